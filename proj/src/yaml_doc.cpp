#include "rosa/detail/yaml_doc.hpp"

#include <yaml-cpp/eventhandler.h>
#include <yaml-cpp/exceptions.h>
#include <yaml-cpp/mark.h>
#include <yaml-cpp/parser.h>

#include <fstream>
#include <sstream>

namespace rosa::detail {

const YamlNode* YamlNode::find(std::string_view key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

class TreeBuilder : public YAML::EventHandler {
 public:
  explicit TreeBuilder(std::string file) : file_(std::move(file)) {}

  void OnDocumentStart(const YAML::Mark&) override {}
  void OnDocumentEnd() override {}

  void OnNull(const YAML::Mark& mark, YAML::anchor_t anchor) override {
    check_anchor(mark, anchor);
    YamlNode node;
    node.loc = loc(mark);
    push(std::move(node));
  }

  void OnAlias(const YAML::Mark& mark, YAML::anchor_t) override {
    throw ParseError(loc(mark), "aliases are not allowed");
  }

  void OnAnchor(const YAML::Mark& mark, const std::string&) override {
    throw ParseError(loc(mark), "anchors are not allowed");
  }

  void OnScalar(const YAML::Mark& mark, const std::string& tag,
                YAML::anchor_t anchor, const std::string& value) override {
    check_anchor(mark, anchor);
    YamlNode node;
    node.kind = YamlNode::Kind::scalar;
    node.scalar = value;
    node.quoted = (tag == "!");
    node.loc = loc(mark);
    push(std::move(node));
  }

  void OnSequenceStart(const YAML::Mark& mark, const std::string&,
                       YAML::anchor_t anchor, YAML::EmitterStyle::value) override {
    check_anchor(mark, anchor);
    YamlNode node;
    node.kind = YamlNode::Kind::sequence;
    node.loc = loc(mark);
    open_.push_back(Frame{std::move(node), {}, false});
  }

  void OnSequenceEnd() override { close(); }

  void OnMapStart(const YAML::Mark& mark, const std::string&,
                  YAML::anchor_t anchor, YAML::EmitterStyle::value) override {
    check_anchor(mark, anchor);
    YamlNode node;
    node.kind = YamlNode::Kind::mapping;
    node.loc = loc(mark);
    open_.push_back(Frame{std::move(node), {}, false});
  }

  void OnMapEnd() override { close(); }

  YamlNode take() { return std::move(root_); }

 private:
  struct Frame {
    YamlNode node;
    std::string pending_key;
    bool have_key;
  };

  SourceLoc loc(const YAML::Mark& mark) const { return {file_, mark.line + 1}; }

  void check_anchor(const YAML::Mark& mark, YAML::anchor_t anchor) const {
    if (anchor != YAML::NullAnchor) throw ParseError(loc(mark), "anchors are not allowed");
  }

  void close() {
    YamlNode done = std::move(open_.back().node);
    open_.pop_back();
    push(std::move(done));
  }

  void push(YamlNode node) {
    if (open_.empty()) {
      root_ = std::move(node);
      return;
    }
    Frame& top = open_.back();
    if (top.node.is_sequence()) {
      top.node.items.push_back(std::move(node));
      return;
    }
    if (!top.have_key) {
      if (!node.is_scalar()) throw ParseError(node.loc, "mapping keys must be scalars");
      if (top.node.find(node.scalar) != nullptr) {
        throw ParseError(node.loc, "duplicate key '" + node.scalar + "'");
      }
      top.pending_key = node.scalar;
      top.have_key = true;
      return;
    }
    top.node.entries.emplace_back(std::move(top.pending_key), std::move(node));
    top.have_key = false;
  }

  std::string file_;
  std::vector<Frame> open_;
  YamlNode root_;
};

}  // namespace

YamlNode parse_yaml(const std::string& text, const std::string& file_name) {
  std::istringstream in(text);
  TreeBuilder builder(file_name);
  try {
    YAML::Parser parser(in);
    if (!parser.HandleNextDocument(builder)) return YamlNode{};
    TreeBuilder extra(file_name);
    if (parser.HandleNextDocument(extra)) {
      throw ParseError({file_name, 0}, "multiple documents are not allowed");
    }
  } catch (const YAML::Exception& e) {
    throw ParseError({file_name, e.mark.line + 1}, e.msg);
  }
  return builder.take();
}

YamlNode load_yaml_file(const std::string& path, const std::string& display_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + display_name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_yaml(buf.str(), display_name);
}

}  // namespace rosa::detail
