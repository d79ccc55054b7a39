#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"
#include "rosa/project.hpp"
#include "rosa/workspace.hpp"

namespace rosa {

using RemapTable = std::map<std::string, std::string>;

/// Graph-name resolution: global names pass through, "~x" resolves under
/// `node_name`, relative names under `ns`; then one exact-match remap.
/// Throws Error for a private name without a node context.
std::string resolve_name(const std::string& name, const std::string& ns,
                         const std::optional<std::string>& node_name, const RemapTable& remaps);

/// Collapses repeated and trailing separators of a global name.
std::string canonical_name(const std::string& name);

std::string parent_namespace(const std::string& global_name);

struct Condition {
  enum class Kind { always, expr };

  Kind kind = Kind::always;
  std::string text;  // empty iff always
  SourceLoc loc;

  static Condition always() { return {}; }
  static Condition expr(std::string text, SourceLoc loc) {
    return {Kind::expr, std::move(text), std::move(loc)};
  }
  bool is_always() const { return kind == Kind::always; }

  /// Conjunction; always is the unit.
  Condition operator&&(const Condition& other) const;

  bool operator==(const Condition&) const = default;
};

struct LaunchedNode {
  std::string name;  // global
  std::string package;
  std::string node_type;
  std::string ns;
  RemapTable remaps;  // resolved source -> resolved target
  Condition condition;
  SourceLoc source_loc;

  bool operator==(const LaunchedNode&) const = default;
};

struct LaunchParam {
  std::string name;  // global
  Unknowable<std::string> value;
  Condition condition;
  SourceLoc loc;

  bool operator==(const LaunchParam&) const = default;
};

struct LaunchInterpretation {
  std::vector<LaunchedNode> nodes;
  std::vector<LaunchParam> parameters;
  std::map<std::string, Unknowable<std::string>> arg_values;  // top-level arguments
  std::vector<std::string> includes;                          // workspace-relative
};

/// Interprets every launch file of a configuration. Missing launch files,
/// include cycles and malformed markup throw; recoverable findings go to
/// `issues`.
LaunchInterpretation interpret_launch(const ConfigSpec& config, const std::vector<Package>& packages,
                                      IssueList& issues);

/// Interprets one launch file with preset arguments.
LaunchInterpretation interpret_launch_file(const std::filesystem::path& file,
                                           const std::vector<Package>& packages,
                                           const std::map<std::string, std::string>& args,
                                           IssueList& issues);

}  // namespace rosa
