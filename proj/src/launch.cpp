#include "rosa/launch.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rosa/detail/xml_doc.hpp"

namespace fs = std::filesystem;

namespace rosa {

std::string canonical_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '/' && !out.empty() && out.back() == '/') continue;
    out += c;
  }
  if (out.size() > 1 && out.back() == '/') out.pop_back();
  return out;
}

std::string parent_namespace(const std::string& global_name) {
  auto slash = global_name.rfind('/');
  if (slash == std::string::npos || slash == 0) return "/";
  return global_name.substr(0, slash);
}

std::string resolve_name(const std::string& name, const std::string& ns,
                         const std::optional<std::string>& node_name, const RemapTable& remaps) {
  if (name.empty()) throw Error("cannot resolve an empty name");
  std::string resolved;
  if (name[0] == '/') {
    resolved = name;
  } else if (name[0] == '~') {
    if (!node_name) throw Error("private name '" + name + "' has no node context");
    resolved = *node_name + "/" + name.substr(1);
  } else {
    resolved = (ns.empty() ? std::string("/") : ns) + "/" + name;
  }
  resolved = canonical_name(resolved);
  if (auto it = remaps.find(resolved); it != remaps.end()) return it->second;
  return resolved;
}

Condition Condition::operator&&(const Condition& other) const {
  if (is_always()) return other;
  if (other.is_always()) return *this;
  return expr(text + " and " + other.text, other.loc);
}

namespace {

using ArgMap = std::map<std::string, Unknowable<std::string>>;

struct Scope {
  std::string ns = "/";
  Condition condition;
  std::vector<std::pair<std::string, std::string>> remaps;  // raw from/to
};

struct FileContext {
  fs::path path;
  std::string display;
  ArgMap args;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read launch file " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string join_ns(const std::string& base, const std::string& ns) {
  if (ns.empty()) return base;
  if (ns[0] == '/') return canonical_name(ns);
  return canonical_name(base + "/" + ns);
}

class Interpreter {
 public:
  Interpreter(const std::vector<Package>& packages, IssueList& issues)
      : packages_(packages), issues_(issues) {}

  LaunchInterpretation result;

  void run_file(const fs::path& file, ArgMap preset, const Scope& scope, bool top_level) {
    const fs::path canon = fs::weakly_canonical(file);
    for (const auto& open : stack_) {
      if (open != canon) continue;
      std::string cycle;
      bool in_cycle = false;
      for (const auto& p : stack_) {
        if (p == canon) in_cycle = true;
        if (in_cycle) cycle += display(p) + " -> ";
      }
      throw Error("cyclic include: " + cycle + display(canon));
    }
    if (!fs::is_regular_file(canon)) throw Error("launch file not found: " + display(canon));

    FileContext ctx{canon, display(canon), std::move(preset)};
    auto root = detail::parse_xml(read_file(canon), ctx.display);
    if (root.name != "launch") {
      throw ParseError({ctx.display, root.line}, "root element must be <launch>");
    }
    stack_.push_back(canon);
    Scope local = scope;
    walk_children(root, ctx, local);
    stack_.pop_back();
    if (top_level) {
      for (const auto& [k, v] : ctx.args) result.arg_values.emplace(k, v);
    }
  }

 private:
  std::string display(const fs::path& p) const {
    for (const auto& pkg : packages_) {
      auto rel = p.lexically_relative(pkg.root);
      if (!rel.empty() && *rel.begin() != "..") return pkg.display(p);
    }
    return p.generic_string();
  }

  SourceLoc loc(const FileContext& ctx, const detail::XmlElement& e) const {
    return {ctx.display, e.line};
  }

  void note(Severity severity, std::string rule, SourceLoc where, std::string message) {
    issues_.push_back(make_issue(severity, Category::model, std::move(rule), FileScope{std::move(where)},
                                 std::move(message)));
  }

  // Expands $(...) forms. Anything not statically determinable makes the
  // whole value unknown, keeping the raw text.
  Unknowable<std::string> substitute(const std::string& raw, const FileContext& ctx) {
    std::string out;
    bool unknown = false;
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw.compare(i, 2, "$(") != 0) {
        out += raw[i++];
        continue;
      }
      std::size_t depth = 1;
      std::size_t j = i + 2;
      while (j < raw.size() && depth > 0) {
        if (raw[j] == '(') ++depth;
        if (raw[j] == ')') --depth;
        ++j;
      }
      if (depth != 0) {
        unknown = true;
        break;
      }
      std::string body = trim(raw.substr(i + 2, j - i - 3));
      i = j;
      auto space = body.find_first_of(" \t");
      std::string cmd = body.substr(0, space);
      std::string arg = space == std::string::npos ? "" : trim(body.substr(space));
      if (cmd == "arg") {
        auto it = ctx.args.find(arg);
        if (it == ctx.args.end() || !it->second.known()) {
          unknown = true;
        } else {
          out += it->second.value();
        }
      } else if (cmd == "find") {
        const Package* pkg = find_package(packages_, arg);
        if (pkg == nullptr) {
          unknown = true;
        } else {
          out += pkg->root.string();
        }
      } else if (cmd == "env" || cmd == "optenv") {
        auto sp = arg.find_first_of(" \t");
        std::string var = arg.substr(0, sp);
        const char* value = std::getenv(var.c_str());
        if (value != nullptr) {
          out += value;
        } else if (cmd == "optenv") {
          out += sp == std::string::npos ? "" : trim(arg.substr(sp));
        } else {
          unknown = true;
        }
      } else if (cmd == "dirname") {
        out += ctx.path.parent_path().string();
      } else {
        // eval, anon and anything unrecognised stay unknown
        unknown = true;
      }
    }
    if (unknown) return Unknowable<std::string>::unknown(raw);
    return out;
  }

  // Returns nullopt when the element is statically pruned.
  std::optional<Condition> element_condition(const detail::XmlElement& e, const FileContext& ctx,
                                             const Condition& outer) {
    Condition cond = outer;
    for (const char* key : {"if", "unless"}) {
      auto raw = e.attr(key);
      if (!raw) continue;
      const bool is_if = std::string_view(key) == "if";
      auto value = substitute(*raw, ctx);
      if (value.known()) {
        std::string v = trim(value.value());
        bool truth;
        if (v == "true" || v == "1" || v == "True") {
          truth = true;
        } else if (v == "false" || v == "0" || v == "False") {
          truth = false;
        } else {
          note(Severity::warning, "launch-condition", loc(ctx, e),
               std::string(key) + " attribute '" + *raw + "' is not a boolean");
          cond = cond && Condition::expr(std::string(key) + " " + *raw, loc(ctx, e));
          continue;
        }
        if (truth != is_if) return std::nullopt;
        continue;
      }
      cond = cond && Condition::expr(std::string(key) + " " + *raw, loc(ctx, e));
    }
    return cond;
  }

  void walk_children(const detail::XmlElement& parent, FileContext& ctx, Scope& scope) {
    for (const auto& child : parent.children) element(child, ctx, scope);
  }

  void element(const detail::XmlElement& e, FileContext& ctx, Scope& scope) {
    if (e.name == "arg") {
      if (!element_condition(e, ctx, Condition::always())) return;
      declare_arg(e, ctx);
      return;
    }
    auto cond = element_condition(e, ctx, scope.condition);
    if (!cond) return;

    if (e.name == "group") {
      Scope inner = scope;
      inner.condition = *cond;
      if (auto ns = e.attr("ns")) {
        auto value = substitute(*ns, ctx);
        if (!value.known()) {
          note(Severity::warning, "unresolved-name", loc(ctx, e),
               "group namespace '" + *ns + "' cannot be determined");
          return;
        }
        inner.ns = join_ns(scope.ns, value.value());
      }
      walk_children(e, ctx, inner);
    } else if (e.name == "node") {
      node(e, ctx, scope, *cond);
    } else if (e.name == "param") {
      param(e, ctx, scope.ns, std::nullopt, *cond);
    } else if (e.name == "rosparam") {
      rosparam(e, ctx, scope.ns, std::nullopt, *cond);
    } else if (e.name == "remap") {
      auto from = e.attr("from");
      auto to = e.attr("to");
      if (from && to) scope.remaps.emplace_back(*from, *to);
    } else if (e.name == "include") {
      include(e, ctx, scope, *cond);
    } else if (e.name == "machine") {
      note(Severity::info, "ignored-element", loc(ctx, e), "machine declarations are ignored");
    } else {
      note(Severity::info, "ignored-element", loc(ctx, e), "element <" + e.name + "> is ignored");
    }
  }

  void declare_arg(const detail::XmlElement& e, FileContext& ctx) {
    auto name = e.attr("name");
    if (!name) {
      note(Severity::warning, "launch-arg", loc(ctx, e), "<arg> without a name");
      return;
    }
    if (ctx.args.contains(*name)) return;
    if (auto value = e.attr("value")) {
      ctx.args.emplace(*name, substitute(*value, ctx));
    } else if (auto def = e.attr("default")) {
      ctx.args.emplace(*name, substitute(*def, ctx));
    }
  }

  std::optional<std::string> resolve_or_note(const std::string& raw, const FileContext& ctx,
                                             const detail::XmlElement& e, const std::string& ns,
                                             const std::optional<std::string>& node_name) {
    auto value = substitute(raw, ctx);
    if (!value.known() || value.value().empty()) {
      note(Severity::warning, "unresolved-name", loc(ctx, e), "name '" + raw + "' cannot be determined");
      return std::nullopt;
    }
    try {
      return resolve_name(value.value(), ns, node_name, {});
    } catch (const Error& err) {
      note(Severity::warning, "unresolved-name", loc(ctx, e), err.what());
      return std::nullopt;
    }
  }

  void node(const detail::XmlElement& e, FileContext& ctx, const Scope& scope, const Condition& cond) {
    if (e.attr("machine")) {
      note(Severity::info, "ignored-attribute", loc(ctx, e), "machine attribute is ignored");
    }
    auto raw_name = e.attr("name");
    if (!raw_name) {
      note(Severity::warning, "unresolved-name", loc(ctx, e), "<node> without a name is skipped");
      return;
    }
    std::string ns = scope.ns;
    if (auto node_ns = e.attr("ns")) {
      auto value = substitute(*node_ns, ctx);
      if (!value.known()) {
        note(Severity::warning, "unresolved-name", loc(ctx, e),
             "node namespace '" + *node_ns + "' cannot be determined");
        return;
      }
      ns = join_ns(ns, value.value());
    }
    auto name = resolve_or_note(*raw_name, ctx, e, ns, std::nullopt);
    if (!name) return;

    LaunchedNode node;
    node.name = *name;
    node.ns = ns;
    node.condition = cond;
    node.source_loc = loc(ctx, e);
    auto pkg = substitute(e.attr("pkg").value_or(""), ctx);
    auto type = substitute(e.attr("type").value_or(""), ctx);
    node.package = pkg.known() ? pkg.value() : pkg.text();
    node.node_type = type.known() ? type.value() : type.text();
    if (!pkg.known() || !type.known()) {
      note(Severity::warning, "unresolved-name", node.source_loc,
           "package or type of node " + node.name + " cannot be determined");
    }

    std::vector<std::pair<std::string, std::string>> remaps = scope.remaps;
    for (const auto& child : e.children) {
      if (child.name != "remap") continue;
      if (!element_condition(child, ctx, Condition::always())) continue;
      auto from = child.attr("from");
      auto to = child.attr("to");
      if (from && to) remaps.emplace_back(*from, *to);
    }
    for (const auto& [from, to] : remaps) {
      auto f = resolve_or_note(from, ctx, e, ns, node.name);
      auto t = resolve_or_note(to, ctx, e, ns, node.name);
      if (f && t) node.remaps[*f] = *t;
    }

    for (const auto& child : e.children) {
      auto child_cond = element_condition(child, ctx, cond);
      if (!child_cond) continue;
      if (child.name == "param") {
        param(child, ctx, node.name, node.name, *child_cond);
      } else if (child.name == "rosparam") {
        rosparam(child, ctx, node.name, node.name, *child_cond);
      } else if (child.name != "remap") {
        note(Severity::info, "ignored-element", loc(ctx, child),
             "element <" + child.name + "> inside <node> is ignored");
      }
    }
    result.nodes.push_back(std::move(node));
  }

  void param(const detail::XmlElement& e, const FileContext& ctx, const std::string& ns,
             const std::optional<std::string>& node_name, const Condition& cond) {
    auto raw_name = e.attr("name");
    if (!raw_name) {
      note(Severity::warning, "launch-param", loc(ctx, e), "<param> without a name");
      return;
    }
    auto name = resolve_or_note(*raw_name, ctx, e, ns, node_name);
    if (!name) return;
    LaunchParam p{*name, Unknowable<std::string>::unknown(), cond, loc(ctx, e)};
    if (auto value = e.attr("value")) {
      p.value = substitute(*value, ctx);
    } else {
      p.value = Unknowable<std::string>::unknown("<external>");
    }
    result.parameters.push_back(std::move(p));
  }

  void rosparam(const detail::XmlElement& e, const FileContext& ctx, const std::string& ns,
                const std::optional<std::string>& node_name, const Condition& cond) {
    const std::string command = e.attr("command").value_or("load");
    if (command != "load") return;
    std::string base = ns;
    if (auto sub = e.attr("ns")) {
      auto value = substitute(*sub, ctx);
      if (!value.known()) {
        note(Severity::warning, "unresolved-name", loc(ctx, e), "rosparam namespace cannot be determined");
        return;
      }
      base = join_ns(ns, value.value());
    }
    std::string name = base;
    if (auto p = e.attr("param")) {
      auto resolved = resolve_or_note(*p, ctx, e, base, node_name);
      if (!resolved) return;
      name = *resolved;
    }
    const std::string body = trim(e.text);
    const bool scalar = !e.attr("file") && e.attr("param") && !body.empty() &&
                        body.find('\n') == std::string::npos &&
                        body.find(": ") == std::string::npos;
    LaunchParam p{name, Unknowable<std::string>::unknown("<rosparam>"), cond, loc(ctx, e)};
    if (scalar) p.value = substitute(body, ctx);
    result.parameters.push_back(std::move(p));
  }

  void include(const detail::XmlElement& e, FileContext& ctx, const Scope& scope, const Condition& cond) {
    auto raw_file = e.attr("file");
    if (!raw_file) {
      note(Severity::warning, "launch-include", loc(ctx, e), "<include> without a file");
      return;
    }
    auto file = substitute(*raw_file, ctx);
    if (!file.known()) {
      note(Severity::warning, "launch-include", loc(ctx, e),
           "included file '" + *raw_file + "' cannot be determined");
      return;
    }
    Scope inner = scope;
    inner.condition = cond;
    if (auto ns = e.attr("ns")) {
      auto value = substitute(*ns, ctx);
      if (!value.known()) {
        note(Severity::warning, "unresolved-name", loc(ctx, e), "include namespace cannot be determined");
        return;
      }
      inner.ns = join_ns(scope.ns, value.value());
    }
    ArgMap passed;
    if (e.attr("pass_all_args").value_or("false") == "true") passed = ctx.args;
    for (const auto& child : e.children) {
      if (child.name != "arg") continue;
      if (!element_condition(child, ctx, Condition::always())) continue;
      auto name = child.attr("name");
      auto value = child.attr("value");
      if (name && value) passed[*name] = substitute(*value, ctx);
    }
    fs::path target = file.value();
    if (target.is_relative()) target = ctx.path.parent_path() / target;
    result.includes.push_back(display(fs::weakly_canonical(target)));
    run_file(target, std::move(passed), inner, false);
  }

  const std::vector<Package>& packages_;
  IssueList& issues_;
  std::vector<fs::path> stack_;
};

ArgMap preset_args(const std::map<std::string, std::string>& args) {
  ArgMap out;
  for (const auto& [k, v] : args) out.emplace(k, v);
  return out;
}

}  // namespace

LaunchInterpretation interpret_launch_file(const fs::path& file, const std::vector<Package>& packages,
                                           const std::map<std::string, std::string>& args,
                                           IssueList& issues) {
  Interpreter interp(packages, issues);
  interp.run_file(file, preset_args(args), Scope{}, true);
  return std::move(interp.result);
}

LaunchInterpretation interpret_launch(const ConfigSpec& config, const std::vector<Package>& packages,
                                      IssueList& issues) {
  Interpreter interp(packages, issues);
  for (const auto& launch : config.launch_files) {
    auto [pkg_name, rel] = split_package_path(launch);
    const Package* pkg = find_package(packages, pkg_name);
    if (pkg == nullptr) throw Error("launch file not found: " + launch);
    fs::path file = pkg->root / rel;
    if (!fs::is_regular_file(file)) throw Error("launch file not found: " + launch);
    interp.run_file(file, {}, Scope{}, true);
  }
  return std::move(interp.result);
}

}  // namespace rosa
