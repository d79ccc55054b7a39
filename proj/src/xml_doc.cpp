#include "rosa/detail/xml_doc.hpp"

#include <expat.h>

#include <memory>

namespace rosa::detail {

std::optional<std::string> XmlElement::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const XmlElement* XmlElement::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

namespace {

struct BuildState {
  XML_Parser parser = nullptr;
  std::vector<XmlElement> stack;
  std::optional<XmlElement> root;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<BuildState*>(data);
  XmlElement element;
  element.name = name;
  element.line = static_cast<int>(XML_GetCurrentLineNumber(state->parser));
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    element.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  state->stack.push_back(std::move(element));
}

void on_end(void* data, const XML_Char*) {
  auto* state = static_cast<BuildState*>(data);
  XmlElement done = std::move(state->stack.back());
  state->stack.pop_back();
  if (state->stack.empty()) {
    state->root = std::move(done);
  } else {
    state->stack.back().children.push_back(std::move(done));
  }
}

void on_text(void* data, const XML_Char* s, int len) {
  auto* state = static_cast<BuildState*>(data);
  if (!state->stack.empty()) state->stack.back().text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

XmlElement parse_xml(const std::string& text, const std::string& display_name) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                        &XML_ParserFree);
  BuildState state;
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);
  XML_SetCharacterDataHandler(parser.get(), &on_text);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ParseError({display_name, static_cast<int>(XML_GetCurrentLineNumber(parser.get()))},
                     XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!state.root) throw ParseError({display_name, 1}, "empty document");
  return std::move(*state.root);
}

}  // namespace rosa::detail
