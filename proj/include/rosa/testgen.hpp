#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rosa/graph.hpp"
#include "rosa/hpl.hpp"
#include "rosa/monitor.hpp"
#include "rosa/msg.hpp"
#include "rosa/trace.hpp"

namespace rosa {

enum class SegmentPurpose { activate_scope, trigger, provoke, settle };

const char* to_string(SegmentPurpose p);

/// Literal-adjacent candidates mined from predicates, keyed by field path.
struct ValueStrategy {
  std::map<std::string, std::vector<long double>> numbers;
  std::map<std::string, std::vector<std::string>> strings;
  PredRef must_match;  // rejection-sample until the payload satisfies it

  bool operator==(const ValueStrategy&) const = default;
};

struct Segment {
  SegmentPurpose purpose = SegmentPurpose::provoke;
  std::vector<std::string> channels;  // one picked per message; empty for settle
  std::map<std::string, ValueStrategy> strategies;  // per channel
  std::pair<int, int> count_range{0, 0};
  std::pair<Rational, Rational> delay_range{Rational(1, 10), Rational(1, 2)};
};

struct TestSchema {
  HplProperty property;
  std::vector<Segment> segments;
};

struct SutChannels {
  std::set<std::string> inputs;
  std::set<std::string> outputs;
};

/// Inputs are the node's subscriptions and outputs its publications; without
/// a node, topics subscribed but never published are inputs and every
/// published topic is an output.
SutChannels infer_sut_channels(const RosGraph& g, const std::optional<std::string>& node = std::nullopt);

/// Throws ValidationError "cannot stimulate ..." when a channel that must be
/// driven is not an input.
TestSchema derive_schema(const HplProperty& p, const SutChannels& sut);

/// Numeric, string and boolean boundary candidates for one channel.
ValueStrategy mine_boundaries(const HplProperty& p, const std::string& channel);

/// Random payload of the given type. Throws Error on a recursive type graph.
nlohmann::json generate_values(const MessageTypeDef& t, const MsgIndex& msgs, const ValueStrategy& strategy,
                               std::mt19937_64& rng);

class SutAdapter {
 public:
  virtual ~SutAdapter() = default;
  virtual void reset() = 0;
  /// Moves the virtual clock forward by `dt` seconds.
  virtual void advance_clock(const Rational& dt) = 0;
  virtual void send(const MessageEvent& e) = 0;
  /// Outputs produced since the last poll, in time order.
  virtual std::vector<MessageEvent> poll() = 0;
};

/// Adapter failure, distinct from property falsification.
class AdapterError : public Error {
 public:
  using Error::Error;
};

/// Speaks the trace-record protocol with a child process over its standard
/// streams: {"reset":true}, {"clock":t}, message records, and a blank line
/// asking for outputs, answered by records and a blank line.
class ProcessAdapter : public SutAdapter {
 public:
  explicit ProcessAdapter(std::string command, int timeout_ms = 10000);
  ~ProcessAdapter() override;
  ProcessAdapter(const ProcessAdapter&) = delete;
  ProcessAdapter& operator=(const ProcessAdapter&) = delete;

  void reset() override;
  void advance_clock(const Rational& dt) override;
  void send(const MessageEvent& e) override;
  std::vector<MessageEvent> poll() override;

 private:
  void start();
  void stop();
  void write_line(const std::string& line);
  std::string read_line();

  std::string command_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  Rational clock_;
};

struct Budget {
  std::size_t max_traces = 100;
  std::size_t max_events_per_trace = 64;
  std::uint64_t seed = 0;
};

struct Counterexample {
  Trace inputs;
  Trace observed;
  Verdict verdict;
  bool shrunk = false;
  std::uint64_t generation_seed = 0;
  std::size_t trace_index = 0;
};

/// Channel -> message type, for every input channel.
using ChannelTypes = std::map<std::string, const MessageTypeDef*>;

ChannelTypes input_types(const SutChannels& sut, const RosGraph& g, const MsgIndex& msgs);

struct CampaignResult {
  std::optional<Counterexample> counterexample;
  std::size_t traces_run = 0;
  std::vector<std::string> transcript;  // one serialized input trace per run
  IssueList warnings;
};

/// Concrete input messages for trace number `k` under `seed`.
Trace materialize(const TestSchema& schema, const ChannelTypes& types, const MsgIndex& msgs, std::uint64_t seed,
                  std::size_t k, std::size_t max_events);

/// Settling time after the last input: the deadline plus half a second, or
/// one second.
Rational settle_time(const HplProperty& p);

/// Replays inputs through a reset adapter and returns the merged observed
/// trace, closed at the final clock.
Trace execute(const Trace& inputs, SutAdapter& adapter, const Rational& settle, std::size_t max_outputs = 10000);

CampaignResult run_campaign(const TestSchema& schema, SutAdapter& adapter, const ChannelTypes& types,
                            const MsgIndex& msgs, const Budget& budget);

/// Greedy shrinking to a fixpoint. A counterexample that no longer fails on
/// replay comes back unchanged with shrunk=false and a warning.
Counterexample shrink(const Counterexample& cex, SutAdapter& adapter, const HplProperty& p, IssueList& warnings);

nlohmann::json campaign_record(const TestSchema& schema, const Budget& budget, const CampaignResult& r);

}  // namespace rosa
