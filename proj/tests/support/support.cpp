#include "support.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rosa/workspace.hpp"

namespace rosa::testing {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PipelineResult analyse_fixture(const std::string& project_file, bool ignore_hints) {
  PipelineOptions o;
  o.project_file = kWorkspace / project_file;
  o.ignore_hints = ignore_hints;
  return run_pipeline(o);
}

TempDir::TempDir() {
  static std::random_device rd;
  path_ = std::filesystem::temp_directory_path() / ("rosa-test-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::write(const std::string& relative, const std::string& text) const {
  auto p = path_ / relative;
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int run(const std::string& command) {
  int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void MuxAdapter::reset() {
  priority_ = false;
  clock_ = Rational(0);
  pending_.clear();
}

void MuxAdapter::advance_clock(const Rational& dt) { clock_ = clock_ + dt; }

void MuxAdapter::send(const MessageEvent& e) {
  if (e.channel == "/priority") {
    priority_ = e.payload.at("data").get<bool>();
  } else if (e.channel == "/controller_cmd") {
    if (!priority_) pending_.push_back({clock_, "/high_cmd", e.payload});
  } else if (e.channel == "/teleop_cmd") {
    pending_.push_back({clock_, "/high_cmd", e.payload});
  } else if (e.channel == "/bumper") {
    if (!(buggy_ && priority_)) pending_.push_back({clock_, "/stop_cmd", nlohmann::json::object()});
  }
}

std::vector<MessageEvent> MuxAdapter::poll() { return std::exchange(pending_, {}); }

SutChannels mux_channels() {
  return {{"/bumper", "/controller_cmd", "/priority", "/teleop_cmd"}, {"/high_cmd", "/stop_cmd"}};
}

MsgIndex fictibot_msgs() {
  MsgIndex msgs = builtin_messages();
  auto def = parse_msg_file(kWorkspace / "fictibot_msgs/msg/BumperEvent.msg", "fictibot_msgs");
  msgs[def.qualified_name] = def;
  return msgs;
}

ChannelTypes mux_types(const MsgIndex& msgs) {
  return {{"/bumper", &msgs.at("fictibot_msgs/BumperEvent")},
          {"/controller_cmd", &msgs.at("std_msgs/Float64")},
          {"/teleop_cmd", &msgs.at("std_msgs/Float64")},
          {"/priority", &msgs.at("std_msgs/Bool")}};
}

namespace {

const std::array<const char*, 3> kChannels{"/a", "/b", "/c"};
const std::array<const char*, 6> kOps{"<", "<=", ">", ">=", "=", "!="};

template <typename T>
T pick(std::mt19937_64& rng, T lo, T hi) {
  return std::uniform_int_distribution<T>(lo, hi)(rng);
}

std::string random_event(std::mt19937_64& rng) {
  std::string e = kChannels[pick<std::size_t>(rng, 0, 2)];
  switch (pick(rng, 0, 3)) {
    case 0: return e;
    case 1: return e + " {data " + kOps[pick<std::size_t>(rng, 0, 5)] + " " + std::to_string(pick(rng, 0, 3)) + "}";
    case 2:
      return e + " {data " + kOps[pick<std::size_t>(rng, 0, 5)] + " " + std::to_string(pick(rng, 0, 3)) +
             (pick(rng, 0, 1) ? " and " : " or ") + "data " + kOps[pick<std::size_t>(rng, 0, 5)] + " " +
             std::to_string(pick(rng, 0, 3)) + "}";
    default: return e + " {data in [" + std::to_string(pick(rng, 0, 1)) + ", " + std::to_string(pick(rng, 2, 3)) + "]}";
  }
}

}  // namespace

HplProperty random_property(std::mt19937_64& rng, ScopeKind scope, PatternKind pattern, bool deadline) {
  std::string text;
  switch (scope) {
    case ScopeKind::globally: text = "globally: "; break;
    case ScopeKind::after: text = "after " + random_event(rng) + ": "; break;
    case ScopeKind::until: text = "until " + random_event(rng) + ": "; break;
    case ScopeKind::after_until: text = "after " + random_event(rng) + " until " + random_event(rng) + ": "; break;
  }
  const std::string a = random_event(rng);
  const std::string b = random_event(rng);
  switch (pattern) {
    case PatternKind::absence: text += "no " + a; break;
    case PatternKind::existence: text += "some " + a; break;
    case PatternKind::response: text += a + " causes " + b; break;
    case PatternKind::prevention: text += a + " forbids " + b; break;
    case PatternKind::requirement: text += a + " requires " + b; break;
  }
  if (deadline && is_binary(pattern)) text += " within " + std::to_string(pick(rng, 1, 4) * 500) + " ms";
  return parse_property(text);
}

HplProperty random_property(std::mt19937_64& rng) {
  auto scope = static_cast<ScopeKind>(pick(rng, 0, 3));
  auto pattern = static_cast<PatternKind>(pick(rng, 0, 4));
  return random_property(rng, scope, pattern, pick(rng, 0, 1) == 1);
}

Trace random_trace(std::mt19937_64& rng, std::size_t max_events) {
  Trace t;
  Rational now(0);
  const std::size_t n = pick<std::size_t>(rng, 0, max_events);
  for (std::size_t i = 0; i < n; ++i) {
    now = now + Rational(pick(rng, 0, 4), 2);
    t.events.push_back({now, kChannels[pick<std::size_t>(rng, 0, 2)], {{"data", pick(rng, 0, 3)}}});
  }
  if (pick(rng, 0, 1)) t.end_time = now + Rational(pick(rng, 0, 4), 2);
  return t;
}

}  // namespace rosa::testing
