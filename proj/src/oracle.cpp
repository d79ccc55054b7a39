#include "rosa/oracle.hpp"

#include <functional>
#include <map>

namespace rosa {

namespace {

struct ScopeInterval {
  std::vector<std::size_t> members;  // eligible event indices, ascending
  bool terminated = false;
};

bool holds(const std::optional<Event>& e, const MessageEvent& m) {
  return e && matches(*e, m.channel, m.payload);
}

// Active-after(k): the scope is active once event k has been processed.
// Inside(k): event k belongs to an interval.
std::vector<ScopeInterval> intervals(const HplProperty& p, const Trace& t) {
  const auto& ev = t.events;
  const std::size_t n = ev.size();
  const Scope& s = p.scope;
  std::vector<ScopeInterval> out;

  auto first = [&](const std::optional<Event>& e) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < n; ++k) {
      if (holds(e, ev[k])) return k;
    }
    return std::nullopt;
  };

  switch (s.kind) {
    case ScopeKind::globally: {
      ScopeInterval iv;
      for (std::size_t k = 0; k < n; ++k) iv.members.push_back(k);
      out.push_back(iv);
      break;
    }
    case ScopeKind::after: {
      auto p0 = first(s.activator);
      if (!p0) break;
      ScopeInterval iv;
      for (std::size_t k = *p0 + 1; k < n; ++k) iv.members.push_back(k);
      out.push_back(iv);
      break;
    }
    case ScopeKind::until: {
      auto q0 = first(s.terminator);
      ScopeInterval iv;
      for (std::size_t k = 0; k < (q0 ? *q0 : n); ++k) iv.members.push_back(k);
      iv.terminated = q0.has_value();
      out.push_back(iv);
      break;
    }
    case ScopeKind::after_until: {
      std::map<long, bool> memo;
      std::function<bool(long)> active_after = [&](long k) -> bool {
        if (k < 0) return false;
        if (auto it = memo.find(k); it != memo.end()) return it->second;
        const bool before = active_after(k - 1);
        const bool opens = !before && holds(s.activator, ev[k]);
        const bool closes = before && holds(s.terminator, ev[k]);
        const bool r = opens || (before && !closes);
        memo[k] = r;
        return r;
      };
      for (std::size_t k = 0; k < n; ++k) {
        const long i = static_cast<long>(k);
        const bool before = active_after(i - 1);
        if (!before && holds(s.activator, ev[k])) {
          out.push_back({});
        } else if (before && holds(s.terminator, ev[k])) {
          out.back().terminated = true;
        } else if (before) {
          out.back().members.push_back(k);
        }
      }
      break;
    }
  }
  return out;
}

bool within(const std::optional<Rational>& d, const Rational& from, const Rational& to) {
  return !d || to - from <= *d;
}

Truth judge(const HplProperty& p, const Trace& t, const ScopeInterval& iv) {
  const auto& ev = t.events;
  const Pattern& pat = p.pattern;
  auto A = [&](std::size_t k) { return matches(pat.event_a, ev[k].channel, ev[k].payload); };
  auto B = [&](std::size_t k) { return pat.event_b && matches(*pat.event_b, ev[k].channel, ev[k].payload); };
  const bool closed = iv.terminated || t.closed();

  switch (pat.kind) {
    case PatternKind::absence:
      for (auto k : iv.members) {
        if (A(k)) return Truth::false_verdict;
      }
      return Truth::true_verdict;
    case PatternKind::existence:
      for (auto k : iv.members) {
        if (A(k)) return Truth::true_verdict;
      }
      return closed ? Truth::false_verdict : Truth::inconclusive;
    case PatternKind::response: {
      Truth result = Truth::true_verdict;
      for (auto i : iv.members) {
        if (!A(i)) continue;
        bool answered = false;
        for (auto j : iv.members) {
          if (j > i && B(j) && within(pat.deadline, ev[i].time, ev[j].time)) answered = true;
        }
        if (answered) continue;
        bool expired = false;
        for (std::size_t k = i + 1; k < ev.size(); ++k) {
          if (pat.deadline && ev[k].time - ev[i].time > *pat.deadline) expired = true;
        }
        if (closed || expired) return Truth::false_verdict;
        result = Truth::inconclusive;
      }
      return result;
    }
    case PatternKind::prevention:
      for (auto i : iv.members) {
        for (auto j : iv.members) {
          if (i < j && A(i) && B(j) && within(pat.deadline, ev[i].time, ev[j].time)) return Truth::false_verdict;
        }
      }
      return Truth::true_verdict;
    case PatternKind::requirement:
      for (auto i : iv.members) {
        if (!A(i)) continue;
        bool preceded = false;
        for (auto j : iv.members) {
          if (j < i && B(j) && within(pat.deadline, ev[j].time, ev[i].time)) preceded = true;
        }
        if (!preceded) return Truth::false_verdict;
      }
      return Truth::true_verdict;
  }
  return Truth::true_verdict;
}

}  // namespace

Verdict oracle_verdict(const HplProperty& p, const Trace& t) {
  Verdict v;
  v.value = Truth::true_verdict;
  for (const auto& iv : intervals(p, t)) {
    Truth r = judge(p, t, iv);
    if (r == Truth::false_verdict) {
      v.value = r;
      v.explanation = "violated in an interval";
      if (!iv.members.empty()) v.witness.push_back(iv.members.front());
      return v;
    }
    if (r == Truth::inconclusive) v.value = r;
  }
  return v;
}

}  // namespace rosa
