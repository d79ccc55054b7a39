#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rosa/core.hpp"
#include "rosa/graph.hpp"
#include "rosa/msg.hpp"
#include "rosa/rational.hpp"

namespace rosa {

struct MessageEvent {
  Rational time;
  std::string channel;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const MessageEvent&) const = default;
};

/// A finite observation. Without end_time the trace is still open: more
/// events could follow.
struct Trace {
  std::vector<MessageEvent> events;
  std::optional<Rational> end_time;

  bool closed() const { return end_time.has_value(); }
  bool operator==(const Trace&) const = default;
};

/// A payload or ordering problem at a specific event.
class TraceError : public Error {
 public:
  TraceError(std::size_t index, const std::string& message);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// One JSON record per line: {"time", "topic", "data"}, or {"end_time"}.
/// A scalar data value stands for {"data": value}.
Trace read_trace(std::istream& in, const std::string& display);
Trace load_trace(const std::filesystem::path& path);
std::string write_trace(const Trace& t);

nlohmann::json event_record(const MessageEvent& e);
MessageEvent parse_event_record(const nlohmann::json& record, const std::string& where);

/// Timestamps non-decreasing and end_time not before the last event.
void check_order(const Trace& t);

/// Empty string when the payload conforms to the type.
std::string payload_problem(const nlohmann::json& payload, const MessageTypeDef& type, const MsgIndex& msgs);

/// Checks each event against its topic's declared type, where known.
/// Throws TraceError naming the first offending event.
void check_payloads(const Trace& t, const RosGraph& g, const MsgIndex& msgs);

}  // namespace rosa
