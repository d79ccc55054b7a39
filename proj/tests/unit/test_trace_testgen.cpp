#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>

#include "rosa/monitor.hpp"
#include "support.hpp"

using namespace rosa;
using rosa::testing::kFixtures;
using rosa::testing::MuxAdapter;

namespace {

const char* kStop = "globally: /bumper causes /stop_cmd within 1 s";

std::vector<SegmentPurpose> purposes(const TestSchema& s) {
  std::vector<SegmentPurpose> out;
  for (const auto& seg : s.segments) out.push_back(seg.purpose);
  return out;
}

TestSchema schema_for(const std::string& text) { return derive_schema(parse_property(text), rosa::testing::mux_channels()); }

bool fails(const HplProperty& p, const Trace& inputs, SutAdapter& adapter) {
  return monitor_trace(p, execute(inputs, adapter, settle_time(p))).value == Truth::false_verdict;
}

std::string mux_command(bool buggy) {
  return "python3 " + (kFixtures / "adapters" / "multiplexer.py").string() + (buggy ? " --buggy" : "");
}

class FlakyAdapter : public SutAdapter {
 public:
  void reset() override {
    if (dropped_) inner_ = MuxAdapter(false);
    inner_.reset();
    priority_ = false;
  }
  void advance_clock(const Rational& dt) override { inner_.advance_clock(dt); }
  void send(const MessageEvent& e) override {
    if (e.channel == "/priority") priority_ = e.payload.at("data").get<bool>();
    if (e.channel == "/bumper" && priority_) dropped_ = true;
    inner_.send(e);
  }
  std::vector<MessageEvent> poll() override { return inner_.poll(); }

 private:
  bool priority_ = false;
  bool dropped_ = false;
  MuxAdapter inner_{true};
};

class BackwardsAdapter : public SutAdapter {
 public:
  void reset() override { sent_ = 0; }
  void advance_clock(const Rational&) override {}
  void send(const MessageEvent&) override { ++sent_; }
  std::vector<MessageEvent> poll() override {
    if (sent_ == 0) return {};
    return {{Rational(5), "/stop_cmd", nlohmann::json::object()}, {Rational(1), "/stop_cmd", nlohmann::json::object()}};
  }

 private:
  int sent_ = 0;
};

}  // namespace

TEST_CASE("schemas for the response pattern") {
  TestSchema s = schema_for(kStop);
  CHECK(purposes(s) == std::vector{SegmentPurpose::provoke, SegmentPurpose::trigger, SegmentPurpose::settle});
  CHECK(s.segments[0].channels == std::vector<std::string>{"/controller_cmd", "/priority", "/teleop_cmd"});
  CHECK(s.segments[0].count_range == std::pair{0, 3});
  CHECK(s.segments[1].channels == std::vector<std::string>{"/bumper"});
  CHECK(s.segments[1].count_range == std::pair{1, 3});
  CHECK(s.segments[2].delay_range == std::pair{Rational(3, 2), Rational(3, 2)});
  CHECK(s.segments[2].channels.empty());
}

TEST_CASE("schemas for every pattern and scope") {
  auto after = schema_for("after /priority {data = true}: /bumper requires /teleop_cmd");
  CHECK(purposes(after) == std::vector{SegmentPurpose::activate_scope, SegmentPurpose::provoke,
                                       SegmentPurpose::trigger, SegmentPurpose::settle});
  CHECK(after.segments[0].count_range == std::pair{1, 1});
  REQUIRE(after.segments[0].strategies.at("/priority").must_match);

  CHECK(purposes(schema_for("globally: /bumper forbids /high_cmd")) ==
        std::vector{SegmentPurpose::trigger, SegmentPurpose::provoke, SegmentPurpose::settle});
  CHECK(purposes(schema_for("globally: /stop_cmd forbids /high_cmd")) ==
        std::vector{SegmentPurpose::provoke, SegmentPurpose::settle});
  auto absence = schema_for("until /bumper: no /high_cmd {data > 3}");
  CHECK(purposes(absence) == std::vector{SegmentPurpose::provoke, SegmentPurpose::settle});
  CHECK(absence.segments[0].count_range == std::pair{1, 6});
  CHECK(absence.segments[0].channels.size() == 4);
  CHECK(purposes(derive_schema(parse_property("globally: some /x"), SutChannels{})) ==
        std::vector{SegmentPurpose::provoke, SegmentPurpose::settle});
  CHECK(settle_time(parse_property("globally: some /x")) == Rational(1));
}

TEST_CASE("channels that cannot be driven") {
  auto message_of = [](const std::string& text) -> std::string {
    try {
      schema_for(text);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "accepted";
  };
  CHECK(message_of("globally: /stop_cmd causes /bumper").find("cannot stimulate trigger /stop_cmd") == 0);
  CHECK(message_of("after /high_cmd: no /stop_cmd").find("cannot stimulate scope activator /high_cmd") == 0);
  CHECK(message_of("globally: /stop_cmd requires /bumper").find("cannot stimulate") == 0);
}

TEST_CASE("sut channels from the graph") {
  auto r = rosa::testing::analyse_fixture("project.yaml");
  const RosGraph& g = r.report.graphs.at(0);
  SutChannels mux = infer_sut_channels(g, "/fictimux");
  CHECK(mux.inputs == std::set<std::string>{"/bumper", "/controller_cmd", "/priority", "/teleop_cmd"});
  CHECK(mux.outputs == std::set<std::string>{"/high_cmd", "/stop_cmd"});
  SutChannels all = infer_sut_channels(g);
  for (const auto& in : all.inputs) CHECK_FALSE(all.outputs.contains(in));
  ChannelTypes types = input_types(mux, g, r.msgs);
  CHECK(types.at("/bumper")->qualified_name == "fictibot_msgs/BumperEvent");
  CHECK(types.at("/priority")->qualified_name == "std_msgs/Bool");
  CHECK_THROWS_AS(input_types(SutChannels{{"/nowhere"}, {}}, g, r.msgs), ValidationError);
}

TEST_CASE("boundary mining") {
  HplProperty p = parse_property("globally: no /bumper {data < 0 or data > 7 or data in {2, 4} or name = \"left\"}");
  ValueStrategy s = mine_boundaries(p, "/bumper");
  CHECK(s.numbers.at("data") == std::vector<long double>{-1, 0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(s.strings.at("name") == std::vector<std::string>{"left"});
  CHECK(mine_boundaries(p, "/other") == ValueStrategy{});
  CHECK(mine_boundaries(parse_property("globally: no /a {x in [1, 3]}"), "/a").numbers.at("x") ==
        std::vector<long double>{0, 1, 2, 3, 4});
}

TEST_CASE("generated payloads conform to their types") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  msgs["demo/Deep"] = parse_msg_text(
      "int8 small\nuint16 count\nfloat32 f\nstring label\nbool[] flags\nint32[3] fixed\nstd_msgs/Float64 nested\n",
      "demo/Deep", "Deep.msg");
  std::mt19937_64 rng(1);
  ValueStrategy strategy = mine_boundaries(parse_property("globally: no /d {small > 126 or count < 1}"), "/d");
  int boundary_hits = 0;
  for (int i = 0; i < 500; ++i) {
    nlohmann::json v = generate_values(msgs.at("demo/Deep"), msgs, strategy, rng);
    CHECK(payload_problem(v, msgs.at("demo/Deep"), msgs) == "");
    CHECK(v["label"].get<std::string>().size() <= 16);
    CHECK(v["flags"].size() <= 8);
    boundary_hits += v["small"] == 127 || v["count"] == 0;
  }
  CHECK(boundary_hits > 50);

  ValueStrategy bumper;
  bumper.must_match = parse_property("globally: no /b {data in {1, 2, 4}}").pattern.event_a.predicate;
  for (int i = 0; i < 200; ++i) {
    nlohmann::json v = generate_values(msgs.at("fictibot_msgs/BumperEvent"), msgs, bumper, rng);
    CHECK(eval_pred(*bumper.must_match, v));
  }

  msgs["demo/Loop"] = parse_msg_text("demo/Loop next\n", "demo/Loop", "Loop.msg");
  CHECK_THROWS_AS(generate_values(msgs.at("demo/Loop"), msgs, {}, rng), Error);
}

TEST_CASE("materialisation is a function of seed and index") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  ChannelTypes types = rosa::testing::mux_types(msgs);
  TestSchema s = schema_for(kStop);
  std::set<std::string> distinct;
  for (std::size_t k = 0; k < 50; ++k) {
    Trace a = materialize(s, types, msgs, 42, k, 64);
    CHECK(a == materialize(s, types, msgs, 42, k, 64));
    distinct.insert(write_trace(a));
    CHECK_FALSE(a.events.empty());
    CHECK(a.events.back().channel == "/bumper");
    CHECK_NOTHROW(check_order(a));
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      Rational gap = a.events[i].time - (i ? a.events[i - 1].time : Rational(0));
      CHECK(gap >= Rational(1, 10));
      CHECK(gap <= Rational(1, 2));
      CHECK(payload_problem(a.events[i].payload, *types.at(a.events[i].channel), msgs) == "");
    }
    CHECK(materialize(s, types, msgs, 42, k, 2).events.size() <= 2);
  }
  CHECK(distinct.size() > 40);
  CHECK(write_trace(materialize(s, types, msgs, 43, 0, 64)) != write_trace(materialize(s, types, msgs, 42, 0, 64)));
}

TEST_CASE("campaign against the in-process multiplexer") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  ChannelTypes types = rosa::testing::mux_types(msgs);
  TestSchema s = schema_for(kStop);
  MuxAdapter buggy(true);
  CampaignResult r = run_campaign(s, buggy, types, msgs, Budget{500, 64, 7});
  REQUIRE(r.counterexample);
  const Counterexample& cex = *r.counterexample;
  CHECK(cex.shrunk);
  CHECK(cex.inputs.events.size() <= 3);
  CHECK(cex.verdict.value == Truth::false_verdict);
  CHECK(r.traces_run == cex.trace_index + 1);
  CHECK(r.transcript.size() == r.traces_run);
  CHECK(fails(s.property, cex.inputs, buggy));
  MuxAdapter correct(false);
  CHECK_FALSE(fails(s.property, cex.inputs, correct));

  nlohmann::json record = campaign_record(s, Budget{500, 64, 7}, r);
  CHECK(record["falsified"] == true);
  CHECK(record["counterexample"]["inputs"].size() == cex.inputs.events.size());
  CHECK(record["counterexample"]["shrunk"] == true);
  CHECK(record["schema"].size() == s.segments.size());

  CampaignResult clean = run_campaign(s, correct, types, msgs, Budget{100, 64, 7});
  CHECK_FALSE(clean.counterexample);
  CHECK(clean.traces_run == 100);
  CHECK(campaign_record(s, Budget{100, 64, 7}, clean)["falsified"] == false);

  CampaignResult again = run_campaign(s, buggy, types, msgs, Budget{500, 64, 7});
  CHECK(again.transcript == r.transcript);
  CHECK(write_trace(again.counterexample->inputs) == write_trace(cex.inputs));
}

TEST_CASE("shrunk counterexamples are locally minimal") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  ChannelTypes types = rosa::testing::mux_types(msgs);
  for (const char* text : {kStop, "globally: /bumper causes /stop_cmd",
                           "globally: /teleop_cmd forbids /stop_cmd within 1 s"}) {
    TestSchema s = schema_for(text);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      MuxAdapter buggy(true);
      CampaignResult r = run_campaign(s, buggy, types, msgs, Budget{200, 64, seed});
      if (!r.counterexample) continue;
      const Trace& in = r.counterexample->inputs;
      REQUIRE(fails(s.property, in, buggy));
      for (std::size_t i = 0; i < in.events.size(); ++i) {
        Trace cand = in;
        cand.events.erase(cand.events.begin() + static_cast<std::ptrdiff_t>(i));
        CHECK_FALSE(fails(s.property, cand, buggy));
      }
    }
  }
}

TEST_CASE("a counterexample that does not replay stays unshrunk") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  TestSchema s = schema_for(kStop);
  FlakyAdapter flaky;
  CampaignResult r = run_campaign(s, flaky, rosa::testing::mux_types(msgs), msgs, Budget{500, 64, 7});
  REQUIRE(r.counterexample);
  CHECK_FALSE(r.counterexample->shrunk);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].rule == "nondeterministic-sut");
  CHECK(r.warnings[0].severity == Severity::warning);
}

TEST_CASE("adapter faults are not falsifications") {
  BackwardsAdapter bad;
  Trace inputs{{{Rational(1), "/bumper", {{"data", 1}}}}, std::nullopt};
  CHECK_THROWS_AS(execute(inputs, bad, Rational(1)), AdapterError);
  Trace observed = execute(Trace{}, bad, Rational(1));
  CHECK(observed.events.empty());
  CHECK(*observed.end_time == Rational(1));
}

TEST_CASE("observed traces merge inputs and outputs") {
  MuxAdapter mux(false);
  Trace inputs{{{Rational(1, 2), "/priority", {{"data", true}}},
                {Rational(1), "/controller_cmd", {{"data", 1.5}}},
                {Rational(2), "/bumper", {{"data", 4}}}},
               std::nullopt};
  Trace seen = execute(inputs, mux, Rational(1));
  REQUIRE(seen.events.size() == 4);
  CHECK(seen.events[3].channel == "/stop_cmd");
  CHECK(seen.events[3].time == Rational(2));
  CHECK(*seen.end_time == Rational(3));
  CHECK_NOTHROW(check_order(seen));
}

TEST_CASE("process adapter") {
  MsgIndex msgs = rosa::testing::fictibot_msgs();
  ChannelTypes types = rosa::testing::mux_types(msgs);
  TestSchema s = schema_for(kStop);
  ProcessAdapter buggy(mux_command(true));
  MuxAdapter reference(true);
  for (std::size_t k = 0; k < 10; ++k) {
    Trace in = materialize(s, types, msgs, 3, k, 64);
    CHECK(write_trace(execute(in, buggy, Rational(3, 2))) == write_trace(execute(in, reference, Rational(3, 2))));
  }
  CampaignResult r = run_campaign(s, buggy, types, msgs, Budget{500, 64, 7});
  REQUIRE(r.counterexample);
  CHECK(r.counterexample->inputs.events.size() <= 3);

  ProcessAdapter dead("exit 0", 2000);
  CHECK_THROWS_AS(execute(Trace{{{Rational(1), "/bumper", {{"data", 1}}}}, std::nullopt}, dead, Rational(1)),
                  AdapterError);
  ProcessAdapter garbage("printf 'not json\\n\\n'; cat >/dev/null", 2000);
  CHECK_THROWS_AS(execute(Trace{}, garbage, Rational(1)), AdapterError);

  auto start = std::chrono::steady_clock::now();
  ProcessAdapter slow("sleep 5", 200);
  CHECK_THROWS_AS(execute(Trace{}, slow, Rational(1)), AdapterError);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(4));
}
