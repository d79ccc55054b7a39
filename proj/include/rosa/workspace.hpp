#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"
#include "rosa/msg.hpp"
#include "rosa/project.hpp"

namespace rosa {

enum class Dialect { cpp, py };

const char* to_string(Dialect d);

struct SourceFile {
  std::filesystem::path path;  // absolute
  std::string display;         // workspace-relative
  Dialect dialect = Dialect::cpp;
  std::size_t line_count = 0;

  bool operator==(const SourceFile&) const = default;
};

struct Package {
  std::string name;
  std::filesystem::path root;
  std::string display_root;  // workspace-relative
  std::vector<SourceFile> source_files;
  std::vector<MessageTypeDef> msg_defs;
  std::vector<std::filesystem::path> launch_files;
  std::optional<std::filesystem::path> build_file;

  /// Workspace-relative rendering of a path under this package.
  std::string display(const std::filesystem::path& p) const;

  bool operator==(const Package&) const = default;
};

struct NodeTarget {
  std::string package;
  std::string target_name;
  std::vector<SourceFile> sources;

  bool operator==(const NodeTarget&) const = default;
};

/// Dialect from extension; nullopt for non-source files.
std::optional<Dialect> dialect_for(const std::filesystem::path& p);

/// Finds whitelisted packages under `ws_root` (one package.xml per package,
/// no nesting). Missing packages and broken message files become issues.
/// Throws Error when `ws_root` does not exist.
std::vector<Package> index_workspace(const std::filesystem::path& ws_root, const ProjectSpec& proj,
                                     IssueList& issues);

/// Maps executables to sources: add_executable targets for C++ and scripts
/// under scripts/ or nodes/ for Python.
std::vector<NodeTarget> associate_targets(const Package& pkg, IssueList& issues);

/// Builtin messages plus every message defined in `packages`.
MsgIndex build_msg_index(const std::vector<Package>& packages);

const Package* find_package(const std::vector<Package>& packages, std::string_view name);

}  // namespace rosa
