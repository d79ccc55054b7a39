#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rosa/hpl.hpp"
#include "rosa/pipeline.hpp"
#include "rosa/testgen.hpp"
#include "rosa/trace.hpp"

namespace rosa::testing {

inline const std::filesystem::path kFixtures{ROSA_FIXTURES};
inline const std::filesystem::path kWorkspace = kFixtures / "fictibot_ws";
inline const std::filesystem::path kGolden{ROSA_GOLDEN};
inline const std::string kCli{ROSA_CLI};

std::string read_file(const std::filesystem::path& p);

/// Full pipeline over a fixture project file in the Fictibot workspace.
PipelineResult analyse_fixture(const std::string& project_file, bool ignore_hints = false);

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& relative, const std::string& text) const;

 private:
  std::filesystem::path path_;
};

/// Exit status of a shell command; stdout and stderr are discarded.
int run(const std::string& command);

/// In-process Fictibot multiplexer. The buggy variant drops the stop command
/// while teleoperation has priority.
class MuxAdapter : public SutAdapter {
 public:
  explicit MuxAdapter(bool buggy) : buggy_(buggy) {}
  void reset() override;
  void advance_clock(const Rational& dt) override;
  void send(const MessageEvent& e) override;
  std::vector<MessageEvent> poll() override;

 private:
  bool buggy_;
  bool priority_ = false;
  Rational clock_;
  std::vector<MessageEvent> pending_;
};

SutChannels mux_channels();
MsgIndex fictibot_msgs();
ChannelTypes mux_types(const MsgIndex& msgs);

// Random properties and traces over /a, /b, /c carrying {data: 0..3}.
HplProperty random_property(std::mt19937_64& rng, ScopeKind scope, PatternKind pattern, bool deadline);
HplProperty random_property(std::mt19937_64& rng);
Trace random_trace(std::mt19937_64& rng, std::size_t max_events = 12);

}  // namespace rosa::testing
