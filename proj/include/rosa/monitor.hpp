#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rosa/hpl.hpp"
#include "rosa/trace.hpp"

namespace rosa {

enum class Truth { true_verdict, false_verdict, inconclusive };

const char* to_string(Truth t);

struct Verdict {
  Truth value = Truth::inconclusive;
  std::vector<std::size_t> witness;  // event indices
  std::string explanation;

  bool definite() const { return value != Truth::inconclusive; }
};

/// Incremental observer. FALSE latches at the offending event; TRUE latches
/// only once no continuation can change it.
class Monitor {
 public:
  explicit Monitor(HplProperty property);

  const HplProperty& property() const { return property_; }

  /// Throws TraceError on an event older than the previous one.
  Verdict feed(const MessageEvent& e);
  /// Final verdict; a trace with an end time is closed.
  Verdict finish(const std::optional<Rational>& end_time);
  const Verdict& current() const { return verdict_; }
  void reset();

 private:
  struct Interval {
    std::size_t start = 0;
    bool satisfied = false;                 // existence
    std::optional<std::size_t> pending;     // oldest open response obligation
    std::optional<Rational> pending_time;
    std::optional<std::size_t> last_a;      // prevention
    std::optional<Rational> last_a_time;
    std::optional<std::size_t> last_b;      // requirement
    std::optional<Rational> last_b_time;
  };

  void open_interval();
  void close_interval(bool terminated);
  void observe(const MessageEvent& e);
  void fail(std::vector<std::size_t> witness, std::string why);

  HplProperty property_;
  Verdict verdict_;
  std::size_t index_ = 0;
  std::optional<Rational> last_time_;
  bool activated_once_ = false;
  bool scope_over_ = false;  // no further interval can open
  std::optional<Interval> interval_;
};

/// Feeds the whole trace and finishes it.
Verdict monitor_trace(const HplProperty& p, const Trace& t);

struct PropertyResult {
  std::string property_id;
  std::string property_text;
  Verdict verdict;
};

/// Checks the trace order (and payloads, when a graph is given) then runs
/// one monitor per property.
std::vector<PropertyResult> check_trace(const std::vector<PropertyEntry>& properties, const Trace& t,
                                        const RosGraph* g = nullptr, const MsgIndex* msgs = nullptr);

}  // namespace rosa
