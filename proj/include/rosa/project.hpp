#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"

namespace rosa {

enum class HintKind { publishers, subscribers, servers, clients, parameters };

const char* to_string(HintKind kind);

/// One partial fact about a node's runtime interface.
struct ChannelHint {
  std::string name;  // topic, service or parameter name
  std::string type;  // "pkg/Type"; may be empty for parameters
  std::optional<std::int64_t> queue_size;

  bool operator==(const ChannelHint&) const = default;
};

struct NodeHints {
  std::vector<ChannelHint> publishers;
  std::vector<ChannelHint> subscribers;
  std::vector<ChannelHint> servers;
  std::vector<ChannelHint> clients;
  std::vector<ChannelHint> parameters;

  const std::vector<ChannelHint>& of(HintKind kind) const;
  std::vector<ChannelHint>& of(HintKind kind);

  bool operator==(const NodeHints&) const = default;
};

struct HintSet {
  std::map<std::string, NodeHints> nodes;  // keyed by global node name

  bool empty() const { return nodes.empty(); }
  bool operator==(const HintSet&) const = default;
};

struct ConfigSpec {
  std::vector<std::string> launch_files;  // "<package>/<relative path>"
  HintSet hints;

  bool operator==(const ConfigSpec&) const = default;
};

struct ProjectSpec {
  std::string project_name;
  std::vector<std::string> packages;
  std::map<std::string, ConfigSpec> configurations;

  bool operator==(const ProjectSpec&) const = default;
};

/// Parses and validates a project file. Unknown keys become warnings in
/// `warnings`; anything structurally wrong throws ParseError or
/// ValidationError.
ProjectSpec parse_project_file(const std::filesystem::path& path, IssueList* warnings = nullptr);

ProjectSpec parse_project_text(const std::string& text, const std::string& file_name,
                               IssueList* warnings = nullptr);

/// Serializes back to the project file layout.
std::string serialize_project(const ProjectSpec& proj);

/// Splits "pkg/dir/file.launch" into {"pkg", "dir/file.launch"}.
std::pair<std::string, std::string> split_package_path(const std::string& path);

}  // namespace rosa
