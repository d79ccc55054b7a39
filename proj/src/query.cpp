#include "rosa/query.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "rosa/detail/yaml_doc.hpp"

namespace rosa {

const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::node: return "node";
    case EntityKind::topic: return "topic";
    case EntityKind::service: return "service";
    case EntityKind::parameter: return "parameter";
    case EntityKind::link: return "link";
  }
  return "node";
}

QuerySyntaxError::QuerySyntaxError(Span span, const std::string& message)
    : Error(message + " (at " + std::to_string(span.begin + 1) + ")"), span_(span) {}

const std::vector<std::string>& entity_attributes(EntityKind k) {
  static const std::vector<std::string> node{"name",     "package",     "type",    "conditional",
                                             "conditions", "has_source", "publishers", "subscribers",
                                             "servers",  "clients",     "reads",   "writes"};
  static const std::vector<std::string> topic{"name",       "type",       "conditional", "conditions",
                                              "unresolved", "publishers", "subscribers", "links"};
  static const std::vector<std::string> service{"name",       "type",    "conditional", "conditions",
                                                "unresolved", "servers", "clients",     "links"};
  static const std::vector<std::string> parameter{"name",       "value", "conditional", "conditions",
                                                  "unresolved", "reads", "writes",      "links"};
  static const std::vector<std::string> link{"name",       "node",       "resource",   "role", "type",
                                             "queue_size", "conditional", "conditions", "provenance",
                                             "file",       "line"};
  switch (k) {
    case EntityKind::node: return node;
    case EntityKind::topic: return topic;
    case EntityKind::service: return service;
    case EntityKind::parameter: return parameter;
    case EntityKind::link: return link;
  }
  return node;
}

namespace {

bool has_attribute(EntityKind k, std::string_view name) {
  const auto& attrs = entity_attributes(k);
  return std::find(attrs.begin(), attrs.end(), name) != attrs.end();
}

std::optional<EntityKind> root_kind(std::string_view name) {
  if (name == "nodes") return EntityKind::node;
  if (name == "topics") return EntityKind::topic;
  if (name == "services") return EntityKind::service;
  if (name == "parameters") return EntityKind::parameter;
  return std::nullopt;
}

std::optional<EntityKind> step_kind(EntityKind from, std::string_view step) {
  auto is = [&](std::initializer_list<EntityKind> ks) { return std::find(ks.begin(), ks.end(), from) != ks.end(); };
  if (step == "publishers" || step == "subscribers") {
    if (is({EntityKind::node, EntityKind::topic})) return EntityKind::link;
  } else if (step == "servers" || step == "clients") {
    if (is({EntityKind::node, EntityKind::service})) return EntityKind::link;
  } else if (step == "reads" || step == "writes") {
    if (is({EntityKind::node, EntityKind::parameter})) return EntityKind::link;
  } else if (step == "node") {
    if (from == EntityKind::link) return EntityKind::node;
  } else if (step == "resource") {
    // resolved per link at evaluation; statically any resource kind
    if (from == EntityKind::link) return EntityKind::topic;
  }
  return std::nullopt;
}

// ------------------------------------------------------------------ lexer

struct QTok {
  enum class Kind { ident, number, string, punct, end };
  Kind kind;
  std::string text;
  Span span;
};

std::vector<QTok> lex_query(const std::string& s) {
  std::vector<QTok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({QTok::Kind::ident, s.substr(b, i - b), {b, i}});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      ++i;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      out.push_back({QTok::Kind::number, s.substr(b, i - b), {b, i}});
    } else if (c == '"' || c == '\'') {
      std::string text;
      ++i;
      while (i < s.size() && s[i] != c) {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        text += s[i++];
      }
      if (i >= s.size()) throw QuerySyntaxError({b, i}, "unterminated string");
      ++i;
      out.push_back({QTok::Kind::string, text, {b, i}});
    } else {
      std::string two = s.substr(i, 2);
      if (two == "==" || two == "!=" || two == "<=" || two == ">=") {
        i += 2;
        out.push_back({QTok::Kind::punct, two, {b, i}});
      } else if (std::string_view("/|[]().<>=").find(c) != std::string_view::npos) {
        ++i;
        out.push_back({QTok::Kind::punct, std::string(1, c), {b, i}});
      } else {
        throw QuerySyntaxError({b, b + 1}, std::string("unexpected character '") + c + "'");
      }
    }
  }
  out.push_back({QTok::Kind::end, "", {s.size(), s.size()}});
  return out;
}

// ----------------------------------------------------------------- parser

class QueryParser {
 public:
  explicit QueryParser(const std::string& text) : toks_(lex_query(text)) {}

  QueryExpr parse(const std::string& text) {
    QueryExpr q;
    q.text = text;
    q.alternatives.push_back(path());
    while (accept_punct("|")) q.alternatives.push_back(path());
    if (peek().kind != QTok::Kind::end) throw QuerySyntaxError(peek().span, "unexpected '" + peek().text + "'");
    return q;
  }

 private:
  const QTok& peek() const { return toks_[pos_]; }
  const QTok& next() { return toks_[pos_++]; }
  bool accept_punct(std::string_view p) {
    if (peek().kind == QTok::Kind::punct && peek().text == p) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view w) {
    if (peek().kind == QTok::Kind::ident && peek().text == w) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) throw QuerySyntaxError(peek().span, "expected '" + std::string(p) + "'");
  }

  QueryPath path() {
    QueryPath p;
    const QTok& root = next();
    auto kind = root.kind == QTok::Kind::ident ? root_kind(root.text) : std::nullopt;
    if (!kind) throw QuerySyntaxError(root.span, "unknown root '" + root.text + "'");
    p.steps.push_back({root.text, *kind, {}, root.span});
    filters(p.steps.back());
    while (accept_punct("/")) {
      const QTok& step = next();
      if (step.kind != QTok::Kind::ident) throw QuerySyntaxError(step.span, "expected a path step");
      auto k = step_kind(p.steps.back().kind, step.text);
      if (!k) {
        throw QuerySyntaxError(step.span, "unknown step '" + step.text + "' from " + to_string(p.steps.back().kind));
      }
      p.steps.push_back({step.text, *k, {}, step.span});
      filters(p.steps.back());
    }
    return p;
  }

  void filters(PathStep& step) {
    while (accept_punct("[")) {
      kind_ = step.kind;
      step.filters.push_back(or_expr());
      expect_punct("]");
    }
  }

  PredPtr make(PredExpr::Op op, std::vector<PredPtr> args, Span span) {
    auto e = std::make_shared<PredExpr>();
    e->op = op;
    e->args = std::move(args);
    e->span = span;
    return e;
  }

  PredPtr or_expr() {
    auto lhs = and_expr();
    while (accept_word("or")) {
      auto rhs = and_expr();
      lhs = make(PredExpr::Op::or_, {lhs, rhs}, {lhs->span.begin, rhs->span.end});
    }
    return lhs;
  }
  PredPtr and_expr() {
    auto lhs = not_expr();
    while (accept_word("and")) {
      auto rhs = not_expr();
      lhs = make(PredExpr::Op::and_, {lhs, rhs}, {lhs->span.begin, rhs->span.end});
    }
    return lhs;
  }
  PredPtr not_expr() {
    Span s = peek().span;
    if (accept_word("not")) {
      auto inner = not_expr();
      return make(PredExpr::Op::not_, {inner}, {s.begin, inner->span.end});
    }
    return comparison();
  }
  PredPtr comparison() {
    auto lhs = operand();
    static const std::pair<const char*, PredExpr::Op> ops[] = {
        {"==", PredExpr::Op::eq}, {"=", PredExpr::Op::eq}, {"!=", PredExpr::Op::ne}, {"<=", PredExpr::Op::le},
        {">=", PredExpr::Op::ge}, {"<", PredExpr::Op::lt}, {">", PredExpr::Op::gt}};
    for (const auto& [text, op] : ops) {
      if (accept_punct(text)) {
        auto rhs = operand();
        return make(op, {lhs, rhs}, {lhs->span.begin, rhs->span.end});
      }
    }
    return lhs;
  }
  PredPtr operand() {
    const QTok& t = next();
    auto e = std::make_shared<PredExpr>();
    e->span = t.span;
    if (t.kind == QTok::Kind::punct && t.text == "(") {
      auto inner = or_expr();
      expect_punct(")");
      return inner;
    }
    if (t.kind == QTok::Kind::number) {
      e->op = PredExpr::Op::number;
      e->number = std::stod(t.text);
      return e;
    }
    if (t.kind == QTok::Kind::string) {
      e->op = PredExpr::Op::string;
      e->text = t.text;
      return e;
    }
    if (t.kind == QTok::Kind::ident) {
      if (t.text == "true" || t.text == "false") {
        e->op = PredExpr::Op::boolean;
        e->flag = t.text == "true";
        return e;
      }
      if (t.text == "exists") {
        auto inner = operand();
        if (inner->op != PredExpr::Op::attr) throw QuerySyntaxError(inner->span, "exists needs an attribute");
        return make(PredExpr::Op::exists, {inner}, {t.span.begin, inner->span.end});
      }
      if (t.text == "self") {
        expect_punct(".");
        const QTok& attr = next();
        if (attr.kind != QTok::Kind::ident) throw QuerySyntaxError(attr.span, "expected an attribute name");
        if (!has_attribute(kind_, attr.text)) {
          throw QuerySyntaxError(attr.span, "unknown attribute '" + attr.text + "' for " + to_string(kind_));
        }
        e->op = PredExpr::Op::attr;
        e->text = attr.text;
        e->span = {t.span.begin, attr.span.end};
        return e;
      }
    }
    throw QuerySyntaxError(t.span, t.kind == QTok::Kind::end ? "unexpected end of query"
                                                              : "unexpected '" + t.text + "'");
  }

  std::vector<QTok> toks_;
  std::size_t pos_ = 0;
  EntityKind kind_ = EntityKind::node;
};

// -------------------------------------------------------------- evaluation

using Entity = std::variant<const NodeInstance*, const ChannelResource*, const ParamResource*, const Link*>;

struct Collection {
  std::vector<std::string> items;
};
using Value = std::variant<std::monostate, bool, double, std::string, Collection>;

enum class Tri { f, t, u };

Tri tri_not(Tri a) { return a == Tri::u ? Tri::u : (a == Tri::t ? Tri::f : Tri::t); }

std::string link_name(const Link& l) { return l.node + " " + to_string(l.role) + " " + l.resource; }

std::vector<std::string> link_names(const std::vector<const Link*>& links) {
  std::vector<std::string> out;
  for (const auto* l : links) out.push_back(link_name(*l));
  return out;
}

std::string format_number(double d) {
  if (std::floor(d) == d && std::fabs(d) < 1e15) return std::to_string(static_cast<long long>(d));
  std::ostringstream out;
  out << d;
  return out.str();
}

class Evaluator {
 public:
  explicit Evaluator(const RosGraph& g) : g_(g) {
    for (const auto& l : g.links) {
      by_node_[l.node].push_back(&l);
      by_resource_[{resource_kind(l.role), l.resource}].push_back(&l);
    }
  }

  std::vector<Entity> root(EntityKind k) const {
    std::vector<Entity> out;
    switch (k) {
      case EntityKind::node:
        for (const auto& n : g_.nodes) out.emplace_back(&n);
        break;
      case EntityKind::topic:
        for (const auto& t : g_.topics) out.emplace_back(&t);
        break;
      case EntityKind::service:
        for (const auto& s : g_.services) out.emplace_back(&s);
        break;
      case EntityKind::parameter:
        for (const auto& p : g_.parameters) out.emplace_back(&p);
        break;
      case EntityKind::link:
        for (const auto& l : g_.links) out.emplace_back(&l);
        break;
    }
    return out;
  }

  std::vector<const Link*> links_of(const Entity& e, std::optional<LinkRole> role) const {
    std::vector<const Link*> all;
    if (auto n = std::get_if<const NodeInstance*>(&e)) {
      if (auto it = by_node_.find((*n)->name); it != by_node_.end()) all = it->second;
    } else if (auto c = std::get_if<const ChannelResource*>(&e)) {
      if (auto it = by_resource_.find({(*c)->kind, (*c)->name}); it != by_resource_.end()) all = it->second;
    } else if (auto p = std::get_if<const ParamResource*>(&e)) {
      if (auto it = by_resource_.find({ResourceKind::parameter, (*p)->name}); it != by_resource_.end()) {
        all = it->second;
      }
    }
    if (!role) return all;
    std::vector<const Link*> out;
    for (const auto* l : all) {
      if (l->role == *role) out.push_back(l);
    }
    return out;
  }

  std::vector<Entity> step(const Entity& e, const std::string& name) const {
    std::vector<Entity> out;
    static const std::map<std::string, LinkRole> roles{
        {"publishers", LinkRole::publisher}, {"subscribers", LinkRole::subscriber}, {"servers", LinkRole::server},
        {"clients", LinkRole::client},       {"reads", LinkRole::param_read},       {"writes", LinkRole::param_write}};
    if (auto it = roles.find(name); it != roles.end()) {
      for (const auto* l : links_of(e, it->second)) out.emplace_back(l);
      return out;
    }
    const Link* l = std::get<const Link*>(e);
    if (name == "node") {
      if (const auto* n = g_.node(l->node)) out.emplace_back(n);
    } else {
      switch (resource_kind(l->role)) {
        case ResourceKind::topic:
          if (const auto* t = g_.topic(l->resource)) out.emplace_back(t);
          break;
        case ResourceKind::service:
          if (const auto* s = g_.service(l->resource)) out.emplace_back(s);
          break;
        case ResourceKind::parameter:
          if (const auto* p = g_.parameter(l->resource)) out.emplace_back(p);
          break;
      }
    }
    return out;
  }

  static std::string name_of(const Entity& e) {
    return std::visit(
        [](const auto* p) -> std::string {
          if constexpr (std::is_same_v<std::decay_t<decltype(*p)>, Link>) {
            return link_name(*p);
          } else {
            return p->name;
          }
        },
        e);
  }

  static EntityKind kind_of(const Entity& e) {
    if (std::holds_alternative<const NodeInstance*>(e)) return EntityKind::node;
    if (auto c = std::get_if<const ChannelResource*>(&e)) {
      return (*c)->kind == ResourceKind::service ? EntityKind::service : EntityKind::topic;
    }
    if (std::holds_alternative<const ParamResource*>(e)) return EntityKind::parameter;
    return EntityKind::link;
  }

  static Collection conditions(const Condition& c) {
    Collection out;
    if (!c.is_always()) out.items.push_back(c.text);
    return out;
  }

  Value attribute(const Entity& e, const std::string& name) const {
    if (name == "name") return name_of(e);
    auto collect = [&](std::optional<LinkRole> role) { return Collection{link_names(links_of(e, role))}; };
    if (auto n = std::get_if<const NodeInstance*>(&e)) {
      const NodeInstance& node = **n;
      if (name == "package") return node.package;
      if (name == "type") return node.node_type;
      if (name == "conditional") return !node.condition.is_always();
      if (name == "conditions") return conditions(node.condition);
      if (name == "has_source") return node.has_source;
    } else if (auto c = std::get_if<const ChannelResource*>(&e)) {
      const ChannelResource& r = **c;
      if (name == "type") return r.msg_type.known() ? Value(r.msg_type.value()) : Value();
      if (name == "conditional") return !r.condition.is_always();
      if (name == "conditions") return conditions(r.condition);
      if (name == "unresolved") return r.unresolved;
      if (name == "links") return collect(std::nullopt);
    } else if (auto p = std::get_if<const ParamResource*>(&e)) {
      const ParamResource& r = **p;
      if (name == "value") return r.value.known() ? Value(r.value.value()) : Value();
      if (name == "conditional") return !r.condition.is_always();
      if (name == "conditions") return conditions(r.condition);
      if (name == "unresolved") return r.unresolved;
      if (name == "links") return collect(std::nullopt);
    } else {
      const Link& l = *std::get<const Link*>(e);
      if (name == "node") return l.node;
      if (name == "resource") return l.resource;
      if (name == "role") return std::string(to_string(l.role));
      if (name == "type") {
        if (l.msg_type.known() && !l.msg_type.value().empty()) return l.msg_type.value();
        return {};
      }
      if (name == "queue_size") {
        if (l.queue_size && l.queue_size->known()) return static_cast<double>(l.queue_size->value());
        return {};
      }
      if (name == "conditional") return l.conditional;
      if (name == "conditions") {
        Collection out;
        if (l.conditional) out.items.push_back(l.condition_text.empty() ? "<conditional>" : l.condition_text);
        return out;
      }
      if (name == "provenance") return std::string(to_string(l.provenance));
      if (name == "file") return l.loc ? Value(l.loc->file) : Value();
      if (name == "line") return l.loc ? Value(static_cast<double>(l.loc->line)) : Value();
    }
    static const std::map<std::string, LinkRole> roles{
        {"publishers", LinkRole::publisher}, {"subscribers", LinkRole::subscriber}, {"servers", LinkRole::server},
        {"clients", LinkRole::client},       {"reads", LinkRole::param_read},       {"writes", LinkRole::param_write}};
    if (auto it = roles.find(name); it != roles.end()) return collect(it->second);
    return {};
  }

  Value value(const PredExpr& p, const Entity& e) const {
    switch (p.op) {
      case PredExpr::Op::attr: return attribute(e, p.text);
      case PredExpr::Op::number: return p.number;
      case PredExpr::Op::string: return p.text;
      case PredExpr::Op::boolean: return p.flag;
      default: {
        Tri t = truth(p, e);
        if (t == Tri::u) return {};
        return t == Tri::t;
      }
    }
  }

  static Tri truthy(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return Tri::u;
    if (auto b = std::get_if<bool>(&v)) return *b ? Tri::t : Tri::f;
    if (auto d = std::get_if<double>(&v)) return *d != 0 ? Tri::t : Tri::f;
    if (auto s = std::get_if<std::string>(&v)) return s->empty() ? Tri::f : Tri::t;
    return std::get<Collection>(v).items.empty() ? Tri::f : Tri::t;
  }

  static Tri compare(PredExpr::Op op, Value a, Value b) {
    if (std::holds_alternative<std::monostate>(a) || std::holds_alternative<std::monostate>(b)) return Tri::u;
    // a collection compared with anything scalar compares by its size
    if (auto c = std::get_if<Collection>(&a)) a = static_cast<double>(c->items.size());
    if (auto c = std::get_if<Collection>(&b)) b = static_cast<double>(c->items.size());
    if (a.index() != b.index()) {
      if (op == PredExpr::Op::eq) return Tri::f;
      if (op == PredExpr::Op::ne) return Tri::t;
      return Tri::u;
    }
    int cmp = 0;
    if (auto x = std::get_if<double>(&a)) {
      double y = std::get<double>(b);
      cmp = *x < y ? -1 : (*x > y ? 1 : 0);
    } else if (auto s = std::get_if<std::string>(&a)) {
      cmp = s->compare(std::get<std::string>(b));
      cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    } else {
      bool x = std::get<bool>(a);
      bool y = std::get<bool>(b);
      if (op != PredExpr::Op::eq && op != PredExpr::Op::ne) return Tri::u;
      cmp = x == y ? 0 : 1;
    }
    bool r = false;
    switch (op) {
      case PredExpr::Op::eq: r = cmp == 0; break;
      case PredExpr::Op::ne: r = cmp != 0; break;
      case PredExpr::Op::lt: r = cmp < 0; break;
      case PredExpr::Op::le: r = cmp <= 0; break;
      case PredExpr::Op::gt: r = cmp > 0; break;
      case PredExpr::Op::ge: r = cmp >= 0; break;
      default: break;
    }
    return r ? Tri::t : Tri::f;
  }

  Tri truth(const PredExpr& p, const Entity& e) const {
    switch (p.op) {
      case PredExpr::Op::not_: return tri_not(truth(*p.args[0], e));
      case PredExpr::Op::and_: {
        Tri a = truth(*p.args[0], e);
        if (a == Tri::f) return Tri::f;
        Tri b = truth(*p.args[1], e);
        if (b == Tri::f) return Tri::f;
        return (a == Tri::t && b == Tri::t) ? Tri::t : Tri::u;
      }
      case PredExpr::Op::or_: {
        Tri a = truth(*p.args[0], e);
        if (a == Tri::t) return Tri::t;
        Tri b = truth(*p.args[1], e);
        if (b == Tri::t) return Tri::t;
        return (a == Tri::f && b == Tri::f) ? Tri::f : Tri::u;
      }
      case PredExpr::Op::exists:
        return std::holds_alternative<std::monostate>(attribute(e, p.args[0]->text)) ? Tri::f : Tri::t;
      case PredExpr::Op::eq:
      case PredExpr::Op::ne:
      case PredExpr::Op::lt:
      case PredExpr::Op::le:
      case PredExpr::Op::gt:
      case PredExpr::Op::ge: return compare(p.op, value(*p.args[0], e), value(*p.args[1], e));
      default: return truthy(value(p, e));
    }
  }

  std::map<std::string, std::string> bindings(const Entity& e) const {
    std::map<std::string, std::string> out;
    for (const auto& attr : entity_attributes(kind_of(e))) {
      Value v = attribute(e, attr);
      if (std::holds_alternative<std::monostate>(v)) continue;
      if (auto b = std::get_if<bool>(&v)) {
        out[attr] = *b ? "true" : "false";
      } else if (auto d = std::get_if<double>(&v)) {
        out[attr] = format_number(*d);
      } else if (auto s = std::get_if<std::string>(&v)) {
        out[attr] = *s;
      } else {
        std::string joined;
        for (const auto& item : std::get<Collection>(v).items) joined += (joined.empty() ? "" : ", ") + item;
        out[attr] = joined;
      }
    }
    out["entity"] = name_of(e);
    out["kind"] = to_string(kind_of(e));
    return out;
  }

 private:
  const RosGraph& g_;
  std::map<std::string, std::vector<const Link*>> by_node_;
  std::map<std::pair<ResourceKind, std::string>, std::vector<const Link*>> by_resource_;
};

std::vector<std::string> placeholders(const std::string& tmpl) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = tmpl.find("${", i)) != std::string::npos) {
    auto close = tmpl.find('}', i);
    if (close == std::string::npos) break;
    out.push_back(tmpl.substr(i + 2, close - i - 2));
    i = close + 1;
  }
  return out;
}

}  // namespace

QueryExpr parse_query(const std::string& text) {
  QueryParser p(text);
  return p.parse(text);
}

Query make_query(std::string name, Severity severity, const std::string& expression, std::string message) {
  Query q;
  q.name = std::move(name);
  q.severity = severity;
  q.expr = parse_query(expression);
  q.message_template = std::move(message);
  for (const auto& ph : placeholders(q.message_template)) {
    if (ph == "entity" || ph == "kind") continue;
    for (const auto& alt : q.expr.alternatives) {
      EntityKind k = alt.result_kind();
      bool ok = has_attribute(k, ph);
      // a /resource step may land on any resource kind
      if (!ok && alt.steps.back().name == "resource") {
        ok = has_attribute(EntityKind::service, ph) || has_attribute(EntityKind::parameter, ph);
      }
      if (!ok) throw ValidationError("query " + q.name + ": unknown placeholder ${" + ph + "}");
    }
  }
  return q;
}

std::vector<Match> eval_query(const QueryExpr& q, const RosGraph& g) {
  Evaluator ev(g);
  std::map<std::pair<std::string, EntityKind>, Entity> found;
  for (const auto& alt : q.alternatives) {
    std::vector<Entity> current;
    for (std::size_t s = 0; s < alt.steps.size(); ++s) {
      const PathStep& step = alt.steps[s];
      std::vector<Entity> next;
      if (s == 0) {
        next = ev.root(step.kind);
      } else {
        for (const auto& e : current) {
          auto more = ev.step(e, step.name);
          next.insert(next.end(), more.begin(), more.end());
        }
      }
      std::vector<Entity> kept;
      std::set<std::pair<std::string, EntityKind>> seen;
      for (const auto& e : next) {
        bool ok = true;
        for (const auto& f : step.filters) {
          if (ev.truth(*f, e) != Tri::t) {
            ok = false;
            break;
          }
        }
        if (ok && seen.insert({Evaluator::name_of(e), Evaluator::kind_of(e)}).second) kept.push_back(e);
      }
      current = std::move(kept);
    }
    for (const auto& e : current) found.emplace(std::make_pair(Evaluator::name_of(e), Evaluator::kind_of(e)), e);
  }
  std::vector<Match> out;
  for (const auto& [key, e] : found) out.push_back({key.first, key.second, ev.bindings(e)});
  return out;
}

std::string render_template(const std::string& tmpl, const Match& m) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, 2, "${") == 0) {
      auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        std::string key = tmpl.substr(i + 2, close - i - 2);
        auto it = m.bindings.find(key);
        out += it != m.bindings.end() ? it->second : "?";
        i = close + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

IssueList run_query(const Query& q, const RosGraph& g) {
  IssueList out;
  for (const auto& m : eval_query(q.expr, g)) {
    std::string entity = m.kind == EntityKind::link ? m.bindings.at("node") : m.entity;
    std::string message = q.message_template.empty() ? q.name + ": " + m.entity : render_template(q.message_template, m);
    out.push_back(make_issue(q.severity, Category::query, q.name, EntityScope{entity}, message));
  }
  return out;
}

std::vector<Query> load_query_file(const std::filesystem::path& path) {
  auto root = detail::load_yaml_file(path.string(), path.filename().string());
  const std::string file = path.filename().string();
  if (root.kind != detail::YamlNode::Kind::sequence) {
    throw ParseError({file, root.loc.line}, "query file must be a list of queries");
  }
  std::vector<Query> out;
  std::set<std::string> names;
  for (const auto& item : root.items) {
    if (item.kind != detail::YamlNode::Kind::mapping) throw ParseError({file, item.loc.line}, "query must be a mapping");
    auto field = [&](const char* key, bool required) -> std::string {
      const detail::YamlNode* n = item.find(key);
      if (n == nullptr) {
        if (required) throw ParseError({file, item.loc.line}, std::string("query is missing '") + key + "'");
        return {};
      }
      if (n->kind != detail::YamlNode::Kind::scalar) {
        throw ParseError({file, n->loc.line}, std::string("'") + key + "' must be a string");
      }
      return n->scalar;
    };
    std::string name = field("name", true);
    std::string sev_text = field("severity", false);
    auto sev = sev_text.empty() ? std::optional<Severity>(Severity::warning) : parse_severity(sev_text);
    if (!sev) throw ParseError({file, item.loc.line}, "unknown severity '" + sev_text + "'");
    if (!names.insert(name).second) throw ParseError({file, item.loc.line}, "duplicate query name '" + name + "'");
    try {
      out.push_back(make_query(name, *sev, field("expression", true), field("message", false)));
    } catch (const QuerySyntaxError& e) {
      throw ParseError({file, item.loc.line}, "query " + name + ": " + e.what());
    }
  }
  return out;
}

IssueList builtin_rules(const RosGraph& g) {
  IssueList out;
  std::map<std::pair<ResourceKind, std::string>, std::vector<const Link*>> by_resource;
  for (const auto& l : g.links) by_resource[{resource_kind(l.role), l.resource}].push_back(&l);
  auto endpoint = [](const Link& l) {
    std::string s = std::string(to_string(l.role)) + " " + l.node;
    if (l.loc) s += " at " + to_string(*l.loc);
    return s;
  };

  auto type_rule = [&](ResourceKind kind, const std::vector<ChannelResource>& resources, const char* rule) {
    for (const auto& r : resources) {
      auto it = by_resource.find({kind, r.name});
      if (it == by_resource.end()) continue;
      std::map<std::string, std::vector<const Link*>> by_type;
      for (const auto* l : it->second) {
        if (l->msg_type.known() && !l->msg_type.value().empty()) by_type[l->msg_type.value()].push_back(l);
      }
      if (by_type.size() < 2) continue;
      std::string msg = std::string(to_string(kind)) + " " + r.name + " has inconsistent types:";
      bool first = true;
      for (const auto& [type, links] : by_type) {
        msg += first ? " " : "; ";
        first = false;
        msg += type + " (";
        for (std::size_t i = 0; i < links.size(); ++i) msg += (i ? ", " : "") + endpoint(*links[i]);
        msg += ")";
      }
      out.push_back(make_issue(Severity::error, Category::query, rule, EntityScope{r.name}, msg));
    }
  };
  type_rule(ResourceKind::topic, g.topics, "R1");
  type_rule(ResourceKind::service, g.services, "R2");

  for (const auto& t : g.topics) {
    auto it = by_resource.find({ResourceKind::topic, t.name});
    if (it == by_resource.end()) continue;
    std::vector<std::string> pubs;
    for (const auto* l : it->second) {
      if (l->role == LinkRole::publisher) pubs.push_back(l->node);
    }
    if (pubs.size() > 1) {
      std::string msg = "topic " + t.name + " has " + std::to_string(pubs.size()) + " publishers:";
      for (std::size_t i = 0; i < pubs.size(); ++i) msg += (i ? ", " : " ") + pubs[i];
      out.push_back(make_issue(Severity::warning, Category::query, "R3", EntityScope{t.name}, msg));
    }
  }

  for (const auto& l : g.links) {
    if (!l.conditional || (l.role != LinkRole::publisher && l.role != LinkRole::subscriber)) continue;
    std::string msg = "conditional " + std::string(to_string(l.role)) + " of " + l.resource + " in " + l.node;
    if (!l.condition_text.empty()) msg += " (" + l.condition_text + ")";
    if (l.loc) msg += " at " + to_string(*l.loc);
    out.push_back(make_issue(Severity::warning, Category::query, "R4", EntityScope{l.node}, msg));
  }

  for (const auto& t : g.topics) {
    if (t.unresolved) continue;
    auto it = by_resource.find({ResourceKind::topic, t.name});
    if (it == by_resource.end()) continue;
    bool pub = false, sub = false;
    for (const auto* l : it->second) {
      pub = pub || l->role == LinkRole::publisher;
      sub = sub || l->role == LinkRole::subscriber;
    }
    if (pub != sub) {
      out.push_back(make_issue(Severity::info, Category::query, "R5", EntityScope{t.name},
                               "topic " + t.name + (pub ? " has publishers but no subscribers"
                                                        : " has subscribers but no publishers")));
    }
  }

  for (const auto& l : g.links) {
    if (resource_kind(l.role) == ResourceKind::parameter) continue;
    const bool unresolved_name = l.resource.starts_with("?");
    const bool unknown_type = !l.msg_type.known();
    if (!unresolved_name && !unknown_type) continue;
    std::string what;
    if (unresolved_name) what = "unresolved name";
    if (unknown_type) what += std::string(what.empty() ? "" : " and ") + "unknown type";
    std::string msg = std::string(to_string(l.role)) + " " + l.resource + " of " + l.node + " has " + what;
    if (l.loc) msg += " at " + to_string(*l.loc);
    out.push_back(make_issue(Severity::warning, Category::query, "R6", EntityScope{l.node}, msg));
  }
  return out;
}

}  // namespace rosa
