#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"

namespace rosa::detail {

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // document order
  std::vector<XmlElement> children;
  std::string text;  // concatenated character data
  int line = 0;

  std::optional<std::string> attr(std::string_view key) const;
  const XmlElement* child(std::string_view name) const;
};

/// Parses a document into an element tree with line numbers.
XmlElement parse_xml(const std::string& text, const std::string& display_name);

}  // namespace rosa::detail
