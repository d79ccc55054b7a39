#pragma once

// Strict structured-text loader: mappings, sequences and scalars only.
// Anchors, aliases and duplicate keys are rejected.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rosa/core.hpp"

namespace rosa::detail {

struct YamlNode {
  enum class Kind { null, scalar, sequence, mapping };

  Kind kind = Kind::null;
  std::string scalar;
  bool quoted = false;  // scalar was written in quotes
  std::vector<YamlNode> items;
  std::vector<std::pair<std::string, YamlNode>> entries;
  SourceLoc loc;

  bool is_scalar() const { return kind == Kind::scalar; }
  bool is_sequence() const { return kind == Kind::sequence; }
  bool is_mapping() const { return kind == Kind::mapping; }
  bool is_null() const { return kind == Kind::null; }

  const YamlNode* find(std::string_view key) const;
};

/// Parses a single document. Empty input yields a null node.
YamlNode parse_yaml(const std::string& text, const std::string& file_name);

YamlNode load_yaml_file(const std::string& path, const std::string& display_name);

}  // namespace rosa::detail
