#include "rosa/monitor.hpp"

namespace rosa {

const char* to_string(Truth t) {
  switch (t) {
    case Truth::true_verdict: return "true";
    case Truth::false_verdict: return "false";
    case Truth::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Monitor::Monitor(HplProperty property) : property_(std::move(property)) { reset(); }

void Monitor::reset() {
  verdict_ = Verdict{};
  index_ = 0;
  last_time_.reset();
  activated_once_ = false;
  scope_over_ = false;
  interval_.reset();
  const ScopeKind k = property_.scope.kind;
  if (k == ScopeKind::globally || k == ScopeKind::until) open_interval();
}

void Monitor::fail(std::vector<std::size_t> witness, std::string why) {
  if (verdict_.definite()) return;
  verdict_.value = Truth::false_verdict;
  verdict_.witness = std::move(witness);
  verdict_.explanation = std::move(why);
}

void Monitor::open_interval() {
  interval_.emplace();
  interval_->start = index_;
  activated_once_ = true;
}

void Monitor::close_interval(bool terminated) {
  const Pattern& pat = property_.pattern;
  Interval& iv = *interval_;
  if (terminated) {
    if (pat.kind == PatternKind::existence && !iv.satisfied) {
      fail({index_}, "scope closed without " + pat.event_a.channel);
    }
    if (pat.kind == PatternKind::response && iv.pending) {
      fail({*iv.pending, index_}, "scope closed before the response to event " + std::to_string(*iv.pending));
    }
  }
  interval_.reset();
}

void Monitor::observe(const MessageEvent& e) {
  const Pattern& pat = property_.pattern;
  Interval& iv = *interval_;
  const bool a = matches(pat.event_a, e.channel, e.payload);
  const bool b = pat.event_b && matches(*pat.event_b, e.channel, e.payload);
  switch (pat.kind) {
    case PatternKind::absence:
      if (a) fail({index_}, "forbidden " + e.channel + " at event " + std::to_string(index_));
      break;
    case PatternKind::existence:
      if (a) iv.satisfied = true;
      break;
    case PatternKind::response:
      if (iv.pending && b) {
        iv.pending.reset();
        iv.pending_time.reset();
      }
      if (a && !iv.pending) {
        iv.pending = index_;
        iv.pending_time = e.time;
      }
      break;
    case PatternKind::prevention:
      if (b && iv.last_a && (!pat.deadline || e.time - *iv.last_a_time <= *pat.deadline)) {
        fail({*iv.last_a, index_}, e.channel + " at event " + std::to_string(index_) + " after " +
                                       pat.event_a.channel + " at event " + std::to_string(*iv.last_a));
      }
      if (a) {
        iv.last_a = index_;
        iv.last_a_time = e.time;
      }
      break;
    case PatternKind::requirement:
      if (a && (!iv.last_b || (pat.deadline && e.time - *iv.last_b_time > *pat.deadline))) {
        fail({index_}, e.channel + " at event " + std::to_string(index_) + " without a prior " +
                           pat.event_b->channel);
      }
      if (b) {
        iv.last_b = index_;
        iv.last_b_time = e.time;
      }
      break;
  }
}

Verdict Monitor::feed(const MessageEvent& e) {
  if (last_time_ && e.time < *last_time_) throw TraceError(index_, "event is older than its predecessor");
  last_time_ = e.time;
  if (verdict_.definite()) {
    ++index_;
    return verdict_;
  }

  const Scope& scope = property_.scope;
  const Pattern& pat = property_.pattern;

  // a pending obligation expires as soon as any later event is past its deadline
  if (interval_ && interval_->pending && pat.deadline && e.time - *interval_->pending_time > *pat.deadline) {
    fail({*interval_->pending}, "no " + pat.event_b->channel + " within the deadline of event " +
                                    std::to_string(*interval_->pending));
  }

  if (!verdict_.definite()) {
    switch (scope.kind) {
      case ScopeKind::globally: observe(e); break;
      case ScopeKind::after:
        if (interval_) {
          observe(e);
        } else if (!activated_once_ && matches(*scope.activator, e.channel, e.payload)) {
          open_interval();
          interval_->start = index_ + 1;
          scope_over_ = true;
        }
        break;
      case ScopeKind::until:
        if (interval_) {
          if (matches(*scope.terminator, e.channel, e.payload)) {
            close_interval(true);
            scope_over_ = true;
          } else {
            observe(e);
          }
        }
        break;
      case ScopeKind::after_until:
        if (!interval_) {
          if (matches(*scope.activator, e.channel, e.payload)) {
            open_interval();
            interval_->start = index_ + 1;
          }
        } else if (matches(*scope.terminator, e.channel, e.payload)) {
          close_interval(true);
        } else {
          observe(e);
        }
        break;
    }
  }

  if (!verdict_.definite()) {
    // early acceptance: nothing that follows can falsify
    const bool single = scope.kind != ScopeKind::after_until;
    if (single && interval_ && pat.kind == PatternKind::existence && interval_->satisfied) {
      verdict_.value = Truth::true_verdict;
      verdict_.explanation = "found " + pat.event_a.channel;
    } else if (scope.kind == ScopeKind::until && scope_over_) {
      verdict_.value = Truth::true_verdict;
      verdict_.explanation = "scope closed without violation";
    }
  }
  ++index_;
  return verdict_;
}

Verdict Monitor::finish(const std::optional<Rational>& end_time) {
  if (verdict_.definite()) return verdict_;
  if (interval_) {
    const Pattern& pat = property_.pattern;
    const bool closed = end_time.has_value();
    if (pat.kind == PatternKind::existence && !interval_->satisfied) {
      if (closed) {
        fail({}, "trace ended without " + pat.event_a.channel);
      } else {
        verdict_.explanation = "no " + pat.event_a.channel + " yet";
        return verdict_;
      }
    }
    if (pat.kind == PatternKind::response && interval_->pending) {
      if (closed) {
        fail({*interval_->pending}, "trace ended before the response to event " +
                                        std::to_string(*interval_->pending));
      } else {
        verdict_.explanation = "response to event " + std::to_string(*interval_->pending) + " still pending";
        return verdict_;
      }
    }
  }
  if (!verdict_.definite()) {
    verdict_.value = Truth::true_verdict;
    verdict_.explanation = "no violation";
  }
  return verdict_;
}

Verdict monitor_trace(const HplProperty& p, const Trace& t) {
  Monitor m(p);
  for (const auto& e : t.events) m.feed(e);
  return m.finish(t.end_time);
}

std::vector<PropertyResult> check_trace(const std::vector<PropertyEntry>& properties, const Trace& t,
                                        const RosGraph* g, const MsgIndex* msgs) {
  check_order(t);
  if (g != nullptr && msgs != nullptr) check_payloads(t, *g, *msgs);
  std::vector<PropertyResult> out;
  for (const auto& entry : properties) {
    out.push_back({entry.id(), print_property(entry.property), monitor_trace(entry.property, t)});
  }
  return out;
}

}  // namespace rosa
