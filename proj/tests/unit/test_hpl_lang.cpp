#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "rosa/hpl.hpp"
#include "support.hpp"

using namespace rosa;
using rosa::testing::analyse_fixture;
using rosa::testing::kFixtures;

namespace {

PredRef field(std::string name) {
  auto p = std::make_shared<Pred>();
  p->op = Pred::Op::field;
  p->field = {std::move(name)};
  return p;
}

PredRef lit(Literal l) {
  auto p = std::make_shared<Pred>();
  p->op = Pred::Op::literal;
  p->literal = std::move(l);
  return p;
}

PredRef node(Pred::Op op, std::vector<PredRef> args) {
  auto p = std::make_shared<Pred>();
  p->op = op;
  p->args = std::move(args);
  return p;
}

PredRef random_pred(std::mt19937_64& rng, int depth) {
  const int pick = static_cast<int>(rng() % (depth > 0 ? 9 : 5));
  auto f = [&] {
    auto p = std::make_shared<Pred>();
    p->op = Pred::Op::field;
    p->field = {std::string(rng() % 2 ? "data" : "pose")};
    if (rng() % 3 == 0) p->field.push_back(static_cast<std::size_t>(rng() % 4));
    if (rng() % 3 == 0) p->field.push_back(std::string("x"));
    return PredRef(p);
  };
  auto scalar = [&]() -> Literal {
    switch (rng() % 4) {
      case 0: return {static_cast<std::int64_t>(rng() % 200) - 100};
      case 1: return {static_cast<double>(static_cast<int>(rng() % 80) - 40) / 8.0};
      case 2: return {std::string(1, static_cast<char>('a' + rng() % 26))};
      default: return {rng() % 2 == 0};
    }
  };
  static const Pred::Op cmps[] = {Pred::Op::eq, Pred::Op::ne, Pred::Op::lt,
                                  Pred::Op::le, Pred::Op::gt, Pred::Op::ge};
  switch (pick) {
    case 0:
    case 1:
    case 2: return node(cmps[rng() % 6], {f(), lit(scalar())});
    case 3: {
      std::vector<PredRef> args{f()};
      for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i) args.push_back(lit(scalar()));
      return node(Pred::Op::in_set, args);
    }
    case 4: {
      auto lo = static_cast<std::int64_t>(rng() % 10);
      return node(Pred::Op::in_range, {f(), lit({lo}), lit({lo + static_cast<std::int64_t>(rng() % 5)})});
    }
    case 5: return node(Pred::Op::not_, {random_pred(rng, depth - 1)});
    case 6: return node(Pred::Op::and_, {random_pred(rng, depth - 1), random_pred(rng, depth - 1)});
    case 7: return node(Pred::Op::or_, {random_pred(rng, depth - 1), random_pred(rng, depth - 1)});
    default: return node(Pred::Op::implies, {random_pred(rng, depth - 1), random_pred(rng, depth - 1)});
  }
}

Event random_event(std::mt19937_64& rng) {
  Event e;
  e.channel = std::string("/") + static_cast<char>('a' + rng() % 3) + (rng() % 2 ? "/sub_topic" : "");
  if (rng() % 2) e.predicate = random_pred(rng, 3);
  return e;
}

HplProperty random_ast(std::mt19937_64& rng) {
  HplProperty p;
  p.scope.kind = static_cast<ScopeKind>(rng() % 4);
  if (p.scope.kind == ScopeKind::after || p.scope.kind == ScopeKind::after_until) p.scope.activator = random_event(rng);
  if (p.scope.kind == ScopeKind::until || p.scope.kind == ScopeKind::after_until) p.scope.terminator = random_event(rng);
  p.pattern.kind = static_cast<PatternKind>(rng() % 5);
  p.pattern.event_a = random_event(rng);
  if (is_binary(p.pattern.kind)) {
    p.pattern.event_b = random_event(rng);
    if (rng() % 2) p.pattern.deadline = Rational(static_cast<std::int64_t>(rng() % 5000), 1000);
  }
  return p;
}

std::string parse_error(const std::string& text) {
  try {
    parse_property(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "accepted";
}

IssueList typecheck_on_fixture(const std::string& text) {
  static const auto r = analyse_fixture("project.yaml");
  return typecheck_property(parse_property(text), r.report.graphs.at(0), r.msgs);
}

}  // namespace

TEST_CASE("bumper range property") {
  HplProperty p = parse_property("globally: no /bumper {data < 0 or data > 7}");
  CHECK(p.scope.kind == ScopeKind::globally);
  CHECK_FALSE(p.scope.activator);
  CHECK(p.pattern.kind == PatternKind::absence);
  CHECK(p.pattern.event_a.channel == "/bumper");
  CHECK_FALSE(p.pattern.event_b);
  CHECK_FALSE(p.pattern.deadline);
  auto expected = node(Pred::Op::or_, {node(Pred::Op::lt, {field("data"), lit({std::int64_t{0}})}),
                                       node(Pred::Op::gt, {field("data"), lit({std::int64_t{7}})})});
  REQUIRE(p.pattern.event_a.predicate);
  CHECK(structurally_equal(*p.pattern.event_a.predicate, *expected));
  CHECK(eval_pred(*p.pattern.event_a.predicate, {{"data", 9}}));
  CHECK_FALSE(eval_pred(*p.pattern.event_a.predicate, {{"data", 3}}));
}

TEST_CASE("bumper causes stop") {
  HplProperty p = parse_property("globally: /bumper causes /stop_cmd");
  CHECK(p.pattern.kind == PatternKind::response);
  CHECK(p.pattern.event_a.channel == "/bumper");
  CHECK(p.pattern.event_b->channel == "/stop_cmd");
  CHECK_FALSE(p.pattern.event_a.predicate);
  CHECK_FALSE(p.pattern.event_b->predicate);
  CHECK_FALSE(p.pattern.deadline);
  CHECK(channels(p) == std::vector<std::string>{"/bumper", "/stop_cmd"});
}

TEST_CASE("every scope token") {
  HplProperty p = parse_property("after /enable until /disable: /cmd {v > 1.0} forbids /crash");
  CHECK(p.scope.kind == ScopeKind::after_until);
  CHECK(p.scope.activator->channel == "/enable");
  CHECK(p.scope.terminator->channel == "/disable");
  CHECK(p.pattern.kind == PatternKind::prevention);
  CHECK(p.pattern.event_b->channel == "/crash");
  CHECK(channels(p) == std::vector<std::string>{"/cmd", "/crash", "/disable", "/enable"});

  CHECK(parse_property("after /go: some /x").scope.kind == ScopeKind::after);
  CHECK(parse_property("until /stop: /a requires /b").pattern.kind == PatternKind::requirement);
  CHECK(parse_property("until /stop: /a requires /b").scope.terminator->channel == "/stop");
}

TEST_CASE("deadlines normalise to rational seconds") {
  CHECK(*parse_property("globally: /a causes /b within 1 s").pattern.deadline == Rational(1));
  CHECK(*parse_property("globally: /a causes /b within 250 ms").pattern.deadline == Rational(1, 4));
  CHECK(*parse_property("globally: /a forbids /b within 1.5 s").pattern.deadline == Rational(3, 2));
  CHECK(*parse_property("globally: /a requires /b within 0 s").pattern.deadline == Rational(0));
}

TEST_CASE("syntax errors name a column") {
  for (const char* bad : {"", "globally", "globally /a causes /b", "sometimes: no /a", "globally: no a",
                          "globally: no /a within 1 s", "globally: some /a within 1 s",
                          "after /enable until /disable: no /cmd {v > 1.0} within 5 s",
                          "globally: /a causes", "globally: /a causes /b within 1 h",
                          "globally: /a causes /b within -1 s", "globally: no /a {data <}",
                          "globally: no /a {data < 1", "globally: no /a {}", "globally: no /a {data in {}}",
                          "globally: no /a {data in [1, 2}", "globally: no /a {\"open}", "globally: no /a extra",
                          "globally: /a causes /b within 1 s s", "globally: no /a {data..x > 1}"}) {
    std::string msg = parse_error(bad);
    CHECK_MESSAGE(msg.find("column ") != std::string::npos, bad << " -> " << msg);
  }
  CHECK(parse_error("globally: no a").find("column 14") != std::string::npos);
}

TEST_CASE("predicate forms") {
  HplProperty p = parse_property(
      "globally: no /s {not (a.b[2] in {1, 2.5, \"x\", true}) implies c in [0, 10] and d != false}");
  const Pred& top = *p.pattern.event_a.predicate;
  CHECK(top.op == Pred::Op::implies);
  CHECK(top.args[0]->op == Pred::Op::not_);
  CHECK(top.args[0]->args[0]->op == Pred::Op::in_set);
  CHECK(to_string(top.args[0]->args[0]->args[0]->field) == "a.b[2]");
  CHECK(top.args[1]->op == Pred::Op::and_);
  CHECK(top.args[1]->args[0]->op == Pred::Op::in_range);

  nlohmann::json msg{{"a", {{"b", {0, 0, 7}}}}, {"c", 3}, {"d", true}};
  CHECK(eval_pred(top, msg));
  msg["a"]["b"][2] = 2.5;
  CHECK(eval_pred(top, msg));
  msg["a"]["b"][2] = 7;
  msg["c"] = 11;
  CHECK_FALSE(eval_pred(top, msg));
  CHECK_FALSE(eval_pred(*node(Pred::Op::eq, {field("missing"), lit({std::int64_t{1}})}), msg));
  CHECK_FALSE(eval_pred(*node(Pred::Op::ne, {field("missing"), lit({std::int64_t{1}})}), msg));
}

TEST_CASE("print and reparse") {
  for (const char* text : {"globally: no /bumper {data < 0 or data > 7}", "globally: /bumper causes /stop_cmd",
                           "after /enable until /disable: /cmd {v > 1.0} forbids /crash",
                           "until /x {a = \"q\\\"uote\"}: /a requires /b within 0.5 s",
                           "globally: no /a {(a or b) and not c}", "globally: no /a {a implies b implies c}"}) {
    HplProperty p = parse_property(text);
    HplProperty q = parse_property(print_property(p));
    CHECK_MESSAGE(p.same_ast(q), text << " printed as " << print_property(p));
    CHECK(print_property(q) == print_property(p));
  }
  CHECK(print_property(parse_property("globally:   /a   causes /b within 250 ms")) ==
        "globally: /a causes /b within 0.25 s");
}

TEST_CASE("random ASTs survive printing") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    HplProperty p = random_ast(rng);
    std::string text = print_property(p);
    HplProperty q;
    REQUIRE_NOTHROW(q = parse_property(text));
    CHECK_MESSAGE(p.same_ast(q), text);
  }
}

TEST_CASE("fixture properties parse once") {
  IssueList issues;
  auto entries = load_properties(kFixtures / "fictibot.hpl", "fictibot.hpl", issues);
  CHECK(issues.empty());
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].id() == "fictibot.hpl:2");
  CHECK(entries[1].id() == "fictibot.hpl:3");
  for (const auto& e : entries) {
    CHECK(parse_property(e.property.source_text).same_ast(e.property));
    CHECK(parse_property(print_property(e.property)).same_ast(e.property));
  }
}

TEST_CASE("malformed property lines become issues") {
  rosa::testing::TempDir dir;
  IssueList issues;
  auto entries = load_properties(dir.write("p.hpl", "globally: some /a # trailing\n\nglobally: nope\n  # only\n"),
                                 "p.hpl", issues);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].id() == "p.hpl:1");
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].severity == Severity::error);
  CHECK(std::get<FileScope>(issues[0].scope).loc.line == 3);
}

TEST_CASE("typecheck against the fixture") {
  CHECK(typecheck_on_fixture("globally: no /bumper {data < 0 or data > 7}").empty());
  CHECK(typecheck_on_fixture("globally: /bumper causes /stop_cmd").empty());
  CHECK(typecheck_on_fixture("globally: no /bumper {data in [0, 7]}").empty());

  IssueList speed = typecheck_on_fixture("globally: no /bumper {speed > 1}");
  REQUIRE(speed.size() == 1);
  CHECK(speed[0].severity == Severity::error);
  CHECK(speed[0].message.find("speed") != std::string::npos);
  CHECK(speed[0].message.find("fictibot_msgs/BumperEvent") != std::string::npos);

  IssueList absent = typecheck_on_fixture("globally: no /lidar {range < 0}");
  REQUIRE(absent.size() == 1);
  CHECK(absent[0].severity == Severity::warning);
  CHECK(absent[0].message.find("/lidar") != std::string::npos);

  IssueList mixed = typecheck_on_fixture("globally: no /bumper {data = \"left\" or data > true}");
  CHECK(mixed.size() == 2);
  for (const auto& i : mixed) CHECK(i.severity == Severity::error);

  CHECK(typecheck_on_fixture("globally: no /bumper {data in {1, \"x\"}}").size() == 1);
}

TEST_CASE("well-typed predicates evaluate on conforming payloads") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    HplProperty p = rosa::testing::random_property(rng);
    for (std::int64_t d = -1; d <= 8; ++d) {
      nlohmann::json payload{{"data", d}};
      for (const Event* e : {&p.pattern.event_a}) {
        if (e->predicate) CHECK_NOTHROW(eval_pred(*e->predicate, payload));
      }
    }
  }
}
