#include "rosa/trace.hpp"

#include <fstream>
#include <sstream>

namespace rosa {

TraceError::TraceError(std::size_t index, const std::string& message)
    : Error("event " + std::to_string(index) + ": " + message), index_(index) {}

namespace {

Rational time_of(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError({where, 0}, "time must be a number");
  Rational t = j.is_number_float() ? Rational::from_double(j.get<double>()) : Rational(j.get<std::int64_t>());
  if (t < Rational(0)) throw ParseError({where, 0}, "time must not be negative");
  return t;
}

nlohmann::json time_json(const Rational& t) {
  if (t.den() == 1) return t.num();
  return t.to_double();
}

}  // namespace

MessageEvent parse_event_record(const nlohmann::json& record, const std::string& where) {
  if (!record.is_object()) throw ParseError({where, 0}, "record must be an object");
  for (const char* key : {"time", "topic"}) {
    if (!record.contains(key)) throw ParseError({where, 0}, std::string("record is missing '") + key + "'");
  }
  if (!record["topic"].is_string()) throw ParseError({where, 0}, "topic must be a string");
  MessageEvent e;
  e.time = time_of(record["time"], where);
  e.channel = record["topic"].get<std::string>();
  if (auto it = record.find("data"); it != record.end()) {
    e.payload = it->is_object() ? *it : nlohmann::json{{"data", *it}};
  }
  return e;
}

nlohmann::json event_record(const MessageEvent& e) {
  return nlohmann::json{{"time", time_json(e.time)}, {"topic", e.channel}, {"data", e.payload}};
}

Trace read_trace(std::istream& in, const std::string& display) {
  Trace t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError({display, line_no}, std::string("malformed record: ") + e.what());
    }
    if (t.end_time) throw ParseError({display, line_no}, "record after end_time");
    try {
      if (record.is_object() && record.contains("end_time")) {
        t.end_time = time_of(record["end_time"], display);
        continue;
      }
      t.events.push_back(parse_event_record(record, display));
    } catch (const ParseError& e) {
      throw ParseError({display, line_no}, e.detail());
    }
  }
  check_order(t);
  return t;
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trace " + path.string());
  return read_trace(in, path.filename().string());
}

std::string write_trace(const Trace& t) {
  std::string out;
  for (const auto& e : t.events) out += event_record(e).dump() + "\n";
  if (t.end_time) out += nlohmann::json{{"end_time", time_json(*t.end_time)}}.dump() + "\n";
  return out;
}

void check_order(const Trace& t) {
  for (std::size_t i = 1; i < t.events.size(); ++i) {
    if (t.events[i].time < t.events[i - 1].time) throw TraceError(i, "timestamp goes backwards");
  }
  if (t.end_time && !t.events.empty() && *t.end_time < t.events.back().time) {
    throw TraceError(t.events.size() - 1, "end_time precedes the last event");
  }
}

namespace {

std::string value_problem(const nlohmann::json& v, const FieldType& type, const MsgIndex& msgs,
                          const std::string& path, int depth);

std::string element_problem(const nlohmann::json& v, FieldType type, const MsgIndex& msgs, const std::string& path,
                            int depth) {
  if (!type.is_builtin()) {
    if (!v.is_object()) return path + " must be an object";
    auto it = msgs.find(type.nested());
    if (it == msgs.end()) return path + " has undefined type " + type.nested();
    if (depth > 32) return path + " nests too deeply";
    for (const auto& f : it->second.fields) {
      auto fv = v.find(f.name);
      if (fv == v.end()) return "missing field " + (path.empty() ? "" : path + ".") + f.name;
      auto p = value_problem(*fv, f.type, msgs, (path.empty() ? "" : path + ".") + f.name, depth + 1);
      if (!p.empty()) return p;
    }
    for (const auto& [k, unused] : v.items()) {
      if (it->second.field(k) == nullptr) return "unknown field " + (path.empty() ? "" : path + ".") + k;
    }
    return {};
  }
  Builtin b = type.builtin();
  if (b == Builtin::bool_) return v.is_boolean() ? "" : path + " must be a bool";
  if (b == Builtin::string) return v.is_string() ? "" : path + " must be a string";
  if (is_float(b)) return v.is_number() ? "" : path + " must be a number";
  if (!v.is_number_integer()) return path + " must be an integer";
  auto [lo, hi] = integer_bounds(b);
  long double x = v.is_number_unsigned() ? static_cast<long double>(v.get<std::uint64_t>())
                                         : static_cast<long double>(v.get<std::int64_t>());
  if (x < lo || x > hi) return path + " is out of range for " + to_string(b);
  return {};
}

std::string value_problem(const nlohmann::json& v, const FieldType& type, const MsgIndex& msgs,
                          const std::string& path, int depth) {
  if (!type.is_array) return element_problem(v, type, msgs, path, depth);
  if (!v.is_array()) return path + " must be an array";
  if (type.fixed_size && v.size() != *type.fixed_size) {
    return path + " must have " + std::to_string(*type.fixed_size) + " elements";
  }
  FieldType elem = type;
  elem.is_array = false;
  elem.fixed_size.reset();
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto p = element_problem(v[i], elem, msgs, path + "[" + std::to_string(i) + "]", depth + 1);
    if (!p.empty()) return p;
  }
  return {};
}

}  // namespace

std::string payload_problem(const nlohmann::json& payload, const MessageTypeDef& type, const MsgIndex& msgs) {
  FieldType t;
  t.base = type.qualified_name;
  return element_problem(payload, t, msgs, "", 0);
}

void check_payloads(const Trace& t, const RosGraph& g, const MsgIndex& msgs) {
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const auto& e = t.events[i];
    const ChannelResource* topic = g.topic(e.channel);
    if (topic == nullptr || !topic->msg_type.known()) continue;
    auto it = msgs.find(topic->msg_type.value());
    if (it == msgs.end()) continue;
    auto problem = payload_problem(e.payload, it->second, msgs);
    if (!problem.empty()) {
      throw TraceError(i, "payload on " + e.channel + " does not conform to " + it->first + ": " + problem);
    }
  }
}

}  // namespace rosa
