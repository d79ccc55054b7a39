#include "rosa/testgen.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <functional>

namespace rosa {

const char* to_string(SegmentPurpose p) {
  switch (p) {
    case SegmentPurpose::activate_scope: return "activate_scope";
    case SegmentPurpose::trigger: return "trigger";
    case SegmentPurpose::provoke: return "provoke";
    case SegmentPurpose::settle: return "settle";
  }
  return "provoke";
}

SutChannels infer_sut_channels(const RosGraph& g, const std::optional<std::string>& node) {
  SutChannels out;
  std::set<std::string> published, subscribed;
  for (const auto& l : g.links) {
    if (l.resource.starts_with("?")) continue;
    if (node && l.node != *node) continue;
    if (l.role == LinkRole::publisher) published.insert(l.resource);
    if (l.role == LinkRole::subscriber) subscribed.insert(l.resource);
  }
  out.outputs = published;
  for (const auto& s : subscribed) {
    if (node || !published.contains(s)) out.inputs.insert(s);
  }
  return out;
}

namespace {

void add_number(ValueStrategy& s, const std::string& path, long double v) {
  auto& list = s.numbers[path];
  for (long double c : {v - 1, v, v + 1}) {
    if (std::find(list.begin(), list.end(), c) == list.end()) list.push_back(c);
  }
  std::sort(list.begin(), list.end());
}

void add_literal(ValueStrategy& s, const std::string& path, const Literal& l) {
  if (l.is_numeric()) {
    add_number(s, path, l.as_number());
  } else if (auto str = std::get_if<std::string>(&l.value)) {
    auto& list = s.strings[path];
    if (std::find(list.begin(), list.end(), *str) == list.end()) list.push_back(*str);
  }
}

void mine(const Pred& p, ValueStrategy& s) {
  switch (p.op) {
    case Pred::Op::field:
    case Pred::Op::literal: return;
    case Pred::Op::in_set:
    case Pred::Op::in_range:
      if (p.args[0]->op == Pred::Op::field) {
        for (std::size_t i = 1; i < p.args.size(); ++i) add_literal(s, to_string(p.args[0]->field), p.args[i]->literal);
      }
      return;
    case Pred::Op::eq:
    case Pred::Op::ne:
    case Pred::Op::lt:
    case Pred::Op::le:
    case Pred::Op::gt:
    case Pred::Op::ge: {
      const Pred& a = *p.args[0];
      const Pred& b = *p.args[1];
      if (a.op == Pred::Op::field && b.op == Pred::Op::literal) add_literal(s, to_string(a.field), b.literal);
      if (b.op == Pred::Op::field && a.op == Pred::Op::literal) add_literal(s, to_string(b.field), a.literal);
      for (const auto& arg : p.args) mine(*arg, s);
      return;
    }
    default:
      for (const auto& arg : p.args) mine(*arg, s);
  }
}

Segment settle_segment(const HplProperty& p) {
  Segment s;
  s.purpose = SegmentPurpose::settle;
  Rational t = settle_time(p);
  s.delay_range = {t, t};
  return s;
}

Segment channel_segment(SegmentPurpose purpose, const HplProperty& p, std::vector<std::string> channels,
                        std::pair<int, int> count, PredRef must_match) {
  Segment s;
  s.purpose = purpose;
  s.channels = std::move(channels);
  s.count_range = count;
  for (const auto& ch : s.channels) {
    ValueStrategy v = mine_boundaries(p, ch);
    v.must_match = must_match;
    s.strategies[ch] = v;
  }
  return s;
}

void require_input(const SutChannels& sut, const std::string& channel, const char* role) {
  if (!sut.inputs.contains(channel)) {
    throw ValidationError("cannot stimulate " + std::string(role) + " " + channel +
                          ": not an input of the system under test");
  }
}

}  // namespace

ValueStrategy mine_boundaries(const HplProperty& p, const std::string& channel) {
  ValueStrategy s;
  std::vector<const Event*> events{&p.pattern.event_a};
  if (p.pattern.event_b) events.push_back(&*p.pattern.event_b);
  if (p.scope.activator) events.push_back(&*p.scope.activator);
  if (p.scope.terminator) events.push_back(&*p.scope.terminator);
  for (const Event* e : events) {
    if (e->channel == channel && e->predicate) mine(*e->predicate, s);
  }
  return s;
}

Rational settle_time(const HplProperty& p) {
  if (p.pattern.deadline) return *p.pattern.deadline + Rational(1, 2);
  return Rational(1);
}

TestSchema derive_schema(const HplProperty& p, const SutChannels& sut) {
  TestSchema schema;
  schema.property = p;
  const std::vector<std::string> all(sut.inputs.begin(), sut.inputs.end());
  if (p.scope.kind == ScopeKind::after || p.scope.kind == ScopeKind::after_until) {
    require_input(sut, p.scope.activator->channel, "scope activator");
    schema.segments.push_back(channel_segment(SegmentPurpose::activate_scope, p, {p.scope.activator->channel},
                                              {1, 1}, p.scope.activator->predicate));
  }
  const Event& a = p.pattern.event_a;
  switch (p.pattern.kind) {
    case PatternKind::response:
    case PatternKind::requirement: {
      require_input(sut, a.channel, "trigger");
      std::vector<std::string> others;
      for (const auto& ch : all) {
        if (ch != a.channel) others.push_back(ch);
      }
      if (!others.empty()) {
        schema.segments.push_back(channel_segment(SegmentPurpose::provoke, p, others, {0, 3}, nullptr));
      }
      schema.segments.push_back(channel_segment(SegmentPurpose::trigger, p, {a.channel}, {1, 3}, a.predicate));
      break;
    }
    case PatternKind::prevention:
      if (sut.inputs.contains(a.channel)) {
        schema.segments.push_back(channel_segment(SegmentPurpose::trigger, p, {a.channel}, {1, 3}, a.predicate));
      }
      schema.segments.push_back(channel_segment(SegmentPurpose::provoke, p, all, {1, 6}, nullptr));
      break;
    case PatternKind::absence:
    case PatternKind::existence:
      schema.segments.push_back(
          channel_segment(SegmentPurpose::provoke, p, all, all.empty() ? std::pair{0, 0} : std::pair{1, 6}, nullptr));
      break;
  }
  schema.segments.push_back(settle_segment(p));
  return schema;
}

namespace {

const char kAlphabet[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-";

void check_acyclic(const std::string& type, const MsgIndex& msgs, std::vector<std::string>& stack) {
  if (std::find(stack.begin(), stack.end(), type) != stack.end()) {
    throw Error("recursive message type: " + type);
  }
  auto it = msgs.find(type);
  if (it == msgs.end()) throw Error("undefined message type " + type);
  stack.push_back(type);
  for (const auto& f : it->second.fields) {
    if (!f.type.is_builtin()) check_acyclic(f.type.nested(), msgs, stack);
  }
  stack.pop_back();
}

class Generator {
 public:
  Generator(const MsgIndex& msgs, const ValueStrategy& s, std::mt19937_64& rng) : msgs_(msgs), s_(s), rng_(rng) {}

  nlohmann::json message(const MessageTypeDef& t, const std::string& prefix) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& f : t.fields) obj[f.name] = field(f.type, prefix.empty() ? f.name : prefix + "." + f.name);
    return obj;
  }

 private:
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  nlohmann::json field(const FieldType& t, const std::string& path) {
    if (!t.is_array) return element(t, path);
    std::size_t n = t.fixed_size ? *t.fixed_size : std::uniform_int_distribution<std::size_t>(0, 8)(rng_);
    FieldType elem = t;
    elem.is_array = false;
    elem.fixed_size.reset();
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) arr.push_back(element(elem, path + "[" + std::to_string(i) + "]"));
    return arr;
  }

  nlohmann::json element(const FieldType& t, const std::string& path) {
    if (!t.is_builtin()) return message(msgs_.at(t.nested()), path);
    const Builtin b = t.builtin();
    if (b == Builtin::bool_) return coin();
    if (b == Builtin::string) {
      if (auto it = s_.strings.find(path); it != s_.strings.end() && !it->second.empty() && coin()) {
        return it->second[std::uniform_int_distribution<std::size_t>(0, it->second.size() - 1)(rng_)];
      }
      std::size_t len = std::uniform_int_distribution<std::size_t>(0, 16)(rng_);
      std::string out;
      for (std::size_t i = 0; i < len; ++i) {
        out += kAlphabet[std::uniform_int_distribution<std::size_t>(0, sizeof(kAlphabet) - 2)(rng_)];
      }
      return out;
    }
    std::vector<long double> candidates;
    if (auto it = s_.numbers.find(path); it != s_.numbers.end()) {
      for (long double c : it->second) {
        if (is_integer(b)) {
          auto [lo, hi] = integer_bounds(b);
          for (long double r : {std::floor(c), std::ceil(c)}) {
            if (r >= lo && r <= hi && std::find(candidates.begin(), candidates.end(), r) == candidates.end()) {
              candidates.push_back(r);
            }
          }
        } else {
          candidates.push_back(c);
        }
      }
    }
    const bool pick = !candidates.empty() && coin();
    if (is_float(b)) {
      if (pick) return static_cast<double>(candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)]);
      return std::uniform_real_distribution<double>(-1000.0, 1000.0)(rng_);
    }
    if (pick) {
      long double c = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
      if (b == Builtin::uint64) return static_cast<std::uint64_t>(c);
      return static_cast<std::int64_t>(c);
    }
    if (b == Builtin::uint64) return std::uniform_int_distribution<std::uint64_t>()(rng_);
    auto [lo, hi] = integer_bounds(b);
    return std::uniform_int_distribution<std::int64_t>(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi))(rng_);
  }

  const MsgIndex& msgs_;
  const ValueStrategy& s_;
  std::mt19937_64& rng_;
};

}  // namespace

nlohmann::json generate_values(const MessageTypeDef& t, const MsgIndex& msgs, const ValueStrategy& strategy,
                               std::mt19937_64& rng) {
  std::vector<std::string> stack{t.qualified_name};
  for (const auto& f : t.fields) {
    if (!f.type.is_builtin()) check_acyclic(f.type.nested(), msgs, stack);
  }
  Generator gen(msgs, strategy, rng);
  nlohmann::json payload = gen.message(t, "");
  if (!strategy.must_match) return payload;
  for (int attempt = 0; attempt < 2000 && !eval_pred(*strategy.must_match, payload); ++attempt) {
    payload = gen.message(t, "");
  }
  return payload;
}

ChannelTypes input_types(const SutChannels& sut, const RosGraph& g, const MsgIndex& msgs) {
  ChannelTypes out;
  for (const auto& ch : sut.inputs) {
    const ChannelResource* topic = g.topic(ch);
    if (topic == nullptr || !topic->msg_type.known()) {
      throw ValidationError("input channel " + ch + " has no known message type");
    }
    auto it = msgs.find(topic->msg_type.value());
    if (it == msgs.end()) throw ValidationError("message type " + topic->msg_type.value() + " is not defined");
    out[ch] = &it->second;
  }
  return out;
}

Trace materialize(const TestSchema& schema, const ChannelTypes& types, const MsgIndex& msgs, std::uint64_t seed,
                  std::size_t k, std::size_t max_events) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  Trace t;
  Rational clock(0);
  for (const auto& seg : schema.segments) {
    if (seg.purpose == SegmentPurpose::settle || seg.channels.empty()) continue;
    int count = std::uniform_int_distribution<int>(seg.count_range.first, seg.count_range.second)(rng);
    for (int c = 0; c < count && t.events.size() < max_events; ++c) {
      const auto lo = seg.delay_range.first * Rational(1000);
      const auto hi = seg.delay_range.second * Rational(1000);
      auto ms = std::uniform_int_distribution<std::int64_t>(lo.num() / lo.den(), hi.num() / hi.den())(rng);
      clock = clock + Rational(ms, 1000);
      const std::string& ch = seg.channels[std::uniform_int_distribution<std::size_t>(0, seg.channels.size() - 1)(rng)];
      auto type = types.find(ch);
      if (type == types.end()) throw ValidationError("no message type for input channel " + ch);
      static const ValueStrategy none;
      auto strat = seg.strategies.find(ch);
      t.events.push_back({clock, ch, generate_values(*type->second, msgs, strat == seg.strategies.end() ? none : strat->second, rng)});
    }
  }
  return t;
}

Trace execute(const Trace& inputs, SutAdapter& adapter, const Rational& settle, std::size_t max_outputs) {
  Trace observed;
  Rational now(0);
  std::size_t outputs = 0;
  auto collect = [&] {
    for (auto& out : adapter.poll()) {
      if (out.time < now) out.time = now;
      if (!observed.events.empty() && out.time < observed.events.back().time) {
        throw AdapterError("adapter output on " + out.channel + " is older than the previous event");
      }
      observed.events.push_back(std::move(out));
      if (++outputs > max_outputs) throw AdapterError("adapter exceeded the output budget");
    }
  };
  try {
    adapter.reset();
    for (const auto& e : inputs.events) {
      if (e.time > now) {
        adapter.advance_clock(e.time - now);
        now = e.time;
      }
      adapter.send(e);
      observed.events.push_back(e);
      collect();
    }
    adapter.advance_clock(settle);
    now = now + settle;
    collect();
  } catch (const AdapterError&) {
    throw;
  } catch (const std::exception& e) {
    throw AdapterError(std::string("adapter failure: ") + e.what());
  }
  observed.end_time = now;
  return observed;
}

CampaignResult run_campaign(const TestSchema& schema, SutAdapter& adapter, const ChannelTypes& types,
                            const MsgIndex& msgs, const Budget& budget) {
  CampaignResult result;
  const Rational settle = settle_time(schema.property);
  for (std::size_t k = 0; k < budget.max_traces; ++k) {
    Trace inputs = materialize(schema, types, msgs, budget.seed, k, budget.max_events_per_trace);
    Trace observed = execute(inputs, adapter, settle, budget.max_events_per_trace * 64);
    result.traces_run = k + 1;
    result.transcript.push_back(write_trace(inputs));
    Verdict v = monitor_trace(schema.property, observed);
    if (v.value != Truth::false_verdict) continue;
    Counterexample cex{inputs, observed, v, false, budget.seed, k};
    result.counterexample = shrink(cex, adapter, schema.property, result.warnings);
    break;
  }
  return result;
}

namespace {

struct Leaf {
  nlohmann::json::json_pointer ptr;
};

void leaves(const nlohmann::json& j, const nlohmann::json::json_pointer& at, std::vector<Leaf>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) leaves(v, at / k, out);
  } else if (j.is_array()) {
    out.push_back({at});
    for (std::size_t i = 0; i < j.size(); ++i) leaves(j[i], at / i, out);
  } else {
    out.push_back({at});
  }
}

}  // namespace

Counterexample shrink(const Counterexample& cex, SutAdapter& adapter, const HplProperty& p, IssueList& warnings) {
  const Rational settle = settle_time(p);
  auto fails = [&](const Trace& inputs) {
    try {
      return monitor_trace(p, execute(inputs, adapter, settle)).value == Truth::false_verdict;
    } catch (const AdapterError&) {
      return false;
    }
  };
  if (!fails(cex.inputs)) {
    warnings.push_back(make_issue(Severity::warning, Category::testing, "nondeterministic-sut", EntityScope{},
                                  "counterexample for '" + print_property(p) +
                                      "' does not replay; keeping it unshrunk"));
    Counterexample out = cex;
    out.shrunk = false;
    return out;
  }

  Trace current = cex.inputs;
  auto try_payload = [&](std::size_t i, const nlohmann::json::json_pointer& ptr, const nlohmann::json& value) {
    Trace cand = current;
    cand.events[i].payload[ptr] = value;
    if (!fails(cand)) return false;
    current = std::move(cand);
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    // single-event deletion
    for (std::size_t i = 0; i < current.events.size();) {
      Trace cand = current;
      cand.events.erase(cand.events.begin() + static_cast<long>(i));
      if (fails(cand)) {
        current = std::move(cand);
        changed = true;
      } else {
        ++i;
      }
    }
    // numbers toward zero
    for (std::size_t i = 0; i < current.events.size(); ++i) {
      std::vector<Leaf> ls;
      leaves(current.events[i].payload, nlohmann::json::json_pointer(), ls);
      for (const auto& leaf : ls) {
        const nlohmann::json v = current.events[i].payload.at(leaf.ptr);
        if (v.is_number_unsigned()) {
          std::uint64_t hi = v.get<std::uint64_t>();
          if (hi == 0) continue;
          if (try_payload(i, leaf.ptr, std::uint64_t{0})) {
            changed = true;
            continue;
          }
          std::uint64_t lo = 0;
          while (hi - lo > 1) {
            std::uint64_t mid = lo + (hi - lo) / 2;
            Trace cand = current;
            cand.events[i].payload[leaf.ptr] = mid;
            if (fails(cand)) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          if (hi != v.get<std::uint64_t>()) changed = try_payload(i, leaf.ptr, hi) || changed;
        } else if (v.is_number_integer()) {
          std::int64_t hi = v.get<std::int64_t>();
          if (hi == 0) continue;
          if (try_payload(i, leaf.ptr, std::int64_t{0})) {
            changed = true;
            continue;
          }
          std::int64_t lo = 0;
          while (hi - lo > 1 || lo - hi > 1) {
            std::int64_t mid = lo + (hi - lo) / 2;
            Trace cand = current;
            cand.events[i].payload[leaf.ptr] = mid;
            if (fails(cand)) {
              hi = mid;
            } else {
              lo = mid;
            }
          }
          if (hi != v.get<std::int64_t>()) changed = try_payload(i, leaf.ptr, hi) || changed;
        } else if (v.is_number_float()) {
          double d = v.get<double>();
          if (d == 0.0) continue;
          if (try_payload(i, leaf.ptr, 0.0)) {
            changed = true;
            continue;
          }
          double t = std::trunc(d);
          if (t != d && try_payload(i, leaf.ptr, t)) changed = true;
        }
      }
    }
    // shorter strings and arrays
    for (std::size_t i = 0; i < current.events.size(); ++i) {
      bool restart = true;
      while (restart) {
        restart = false;
        std::vector<Leaf> ls;
        leaves(current.events[i].payload, nlohmann::json::json_pointer(), ls);
        for (const auto& leaf : ls) {
          const nlohmann::json v = current.events[i].payload.at(leaf.ptr);
          if (v.is_string() && !v.get<std::string>().empty()) {
            const std::string s = v.get<std::string>();
            if (try_payload(i, leaf.ptr, std::string()) || try_payload(i, leaf.ptr, s.substr(0, s.size() / 2)) ||
                try_payload(i, leaf.ptr, s.substr(0, s.size() - 1))) {
              changed = restart = true;
              break;
            }
          } else if (v.is_array() && !v.empty()) {
            nlohmann::json half(v.begin(), v.begin() + static_cast<long>(v.size() / 2));
            nlohmann::json drop(v.begin(), v.end() - 1);
            if (try_payload(i, leaf.ptr, nlohmann::json::array()) || try_payload(i, leaf.ptr, half) ||
                try_payload(i, leaf.ptr, drop)) {
              changed = restart = true;
              break;
            }
          }
        }
      }
    }
  }

  Counterexample out = cex;
  out.inputs = current;
  out.observed = execute(current, adapter, settle);
  out.verdict = monitor_trace(p, out.observed);
  out.shrunk = true;
  return out;
}

nlohmann::json campaign_record(const TestSchema& schema, const Budget& budget, const CampaignResult& r) {
  nlohmann::json rec;
  rec["property"] = print_property(schema.property);
  rec["seed"] = budget.seed;
  rec["budget"] = {{"max_traces", budget.max_traces}, {"max_events_per_trace", budget.max_events_per_trace}};
  rec["traces_run"] = r.traces_run;
  rec["falsified"] = r.counterexample.has_value();
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : schema.segments) {
    segments.push_back({{"purpose", to_string(s.purpose)},
                        {"channels", s.channels},
                        {"count", {s.count_range.first, s.count_range.second}},
                        {"delay", {s.delay_range.first.to_string(), s.delay_range.second.to_string()}}});
  }
  rec["schema"] = segments;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& e : c.inputs.events) inputs.push_back(event_record(e));
    nlohmann::json observed = nlohmann::json::array();
    for (const auto& e : c.observed.events) observed.push_back(event_record(e));
    rec["counterexample"] = {{"inputs", inputs},
                             {"observed", observed},
                             {"end_time", c.observed.end_time ? c.observed.end_time->to_string() : ""},
                             {"shrunk", c.shrunk},
                             {"generation_seed", c.generation_seed},
                             {"trace_index", c.trace_index},
                             {"verdict", to_string(c.verdict.value)},
                             {"witness", c.verdict.witness},
                             {"explanation", c.verdict.explanation}};
  }
  return rec;
}

// ------------------------------------------------------------ child process

ProcessAdapter::ProcessAdapter(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {
  std::signal(SIGPIPE, SIG_IGN);
}

ProcessAdapter::~ProcessAdapter() { stop(); }

void ProcessAdapter::start() {
  int in[2], out[2];
  if (pipe(in) != 0 || pipe(out) != 0) throw AdapterError("cannot create pipes for adapter");
  pid_t pid = fork();
  if (pid < 0) throw AdapterError("cannot start adapter");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    close(in[0]);
    close(in[1]);
    close(out[0]);
    close(out[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
}

void ProcessAdapter::stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  int status = 0;
  for (int i = 0; i < 50; ++i) {
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      kill(-pid_, SIGKILL);
      pid_ = -1;
      return;
    }
    usleep(2000);
  }
  kill(-pid_, SIGKILL);
  waitpid(pid_, &status, 0);
  pid_ = -1;
}

void ProcessAdapter::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      stop();
      throw AdapterError("adapter closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string ProcessAdapter::read_line() {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int r = ::poll(&pfd, 1, timeout_ms_);
    if (r == 0) {
      stop();
      throw AdapterError("adapter did not answer within " + std::to_string(timeout_ms_) + " ms");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw AdapterError("cannot read from adapter");
    }
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop();
      throw AdapterError("adapter exited");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ProcessAdapter::reset() {
  if (pid_ < 0) start();
  clock_ = Rational(0);
  write_line(nlohmann::json{{"reset", true}}.dump());
}

void ProcessAdapter::advance_clock(const Rational& dt) {
  clock_ = clock_ + dt;
  nlohmann::json t = clock_.den() == 1 ? nlohmann::json(clock_.num()) : nlohmann::json(clock_.to_double());
  write_line(nlohmann::json{{"clock", t}}.dump());
}

void ProcessAdapter::send(const MessageEvent& e) { write_line(event_record(e).dump()); }

std::vector<MessageEvent> ProcessAdapter::poll() {
  write_line("");
  std::vector<MessageEvent> out;
  for (;;) {
    std::string line = read_line();
    if (line.find_first_not_of(" \t") == std::string::npos) break;
    try {
      out.push_back(parse_event_record(nlohmann::json::parse(line), "adapter"));
    } catch (const std::exception& e) {
      throw AdapterError(std::string("malformed adapter output: ") + e.what());
    }
  }
  return out;
}

}  // namespace rosa
