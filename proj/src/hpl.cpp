#include "rosa/hpl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace rosa {

std::string to_string(const FieldPath& path) {
  std::string out;
  for (const auto& step : path) {
    if (auto name = std::get_if<std::string>(&step)) {
      if (!out.empty()) out += '.';
      out += *name;
    } else {
      out += "[" + std::to_string(std::get<std::size_t>(step)) + "]";
    }
  }
  return out;
}

long double Literal::as_number() const {
  if (auto i = std::get_if<std::int64_t>(&value)) return static_cast<long double>(*i);
  if (auto d = std::get_if<double>(&value)) return *d;
  return 0;
}

bool structurally_equal(const Pred& a, const Pred& b) {
  if (a.op != b.op || a.field != b.field || a.literal != b.literal || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool Event::operator==(const Event& o) const {
  if (channel != o.channel || static_cast<bool>(predicate) != static_cast<bool>(o.predicate)) return false;
  return !predicate || structurally_equal(*predicate, *o.predicate);
}

const char* to_string(ScopeKind k) {
  switch (k) {
    case ScopeKind::globally: return "globally";
    case ScopeKind::after: return "after";
    case ScopeKind::until: return "until";
    case ScopeKind::after_until: return "after_until";
  }
  return "globally";
}

const char* to_string(PatternKind k) {
  switch (k) {
    case PatternKind::absence: return "absence";
    case PatternKind::existence: return "existence";
    case PatternKind::response: return "response";
    case PatternKind::prevention: return "prevention";
    case PatternKind::requirement: return "requirement";
  }
  return "absence";
}

bool is_binary(PatternKind k) {
  return k == PatternKind::response || k == PatternKind::prevention || k == PatternKind::requirement;
}

namespace {

// ------------------------------------------------------------------ lexer

struct HTok {
  enum class Kind { word, number, string, channel, punct, end };
  Kind kind;
  std::string text;
  std::size_t col;  // 1-based
};

std::vector<HTok> lex(const std::string& s) {
  std::vector<HTok> out;
  std::size_t i = 0;
  auto fail = [&](std::size_t at, const std::string& msg) {
    throw ParseError({"<property>", 1}, "column " + std::to_string(at + 1) + ": " + msg);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t b = i;
    if (c == '/') {
      ++i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '/')) ++i;
      if (i == b + 1) fail(b, "empty channel name");
      out.push_back({HTok::Kind::channel, s.substr(b, i - b), b + 1});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({HTok::Kind::word, s.substr(b, i - b), b + 1});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      ++i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({HTok::Kind::number, s.substr(b, i - b), b + 1});
    } else if (c == '"') {
      std::string text;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        text += s[i++];
      }
      if (i >= s.size()) fail(b, "unterminated string");
      ++i;
      out.push_back({HTok::Kind::string, text, b + 1});
    } else {
      std::string two = s.substr(i, 2);
      if (two == "!=" || two == "<=" || two == ">=" || two == "==") {
        i += 2;
        out.push_back({HTok::Kind::punct, two == "==" ? "=" : two, b + 1});
      } else if (std::string_view("{}()[],:.=<>").find(c) != std::string_view::npos) {
        ++i;
        out.push_back({HTok::Kind::punct, std::string(1, c), b + 1});
      } else {
        fail(b, std::string("unexpected character '") + c + "'");
      }
    }
  }
  out.push_back({HTok::Kind::end, "", s.size() + 1});
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{"globally", "after",    "until", "no",  "some",    "causes",
                                       "forbids",  "requires", "within", "and", "or",     "not",
                                       "implies",  "in",       "true",  "false"};
  return k;
}

// ----------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  HplProperty property(const std::string& text) {
    HplProperty p;
    p.source_text = text;
    p.scope = scope();
    expect(":");
    p.pattern = pattern();
    if (peek().kind != HTok::Kind::end) fail("unexpected '" + peek().text + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError({"<property>", 1}, "column " + std::to_string(peek().col) + ": " + msg);
  }
  const HTok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is_word(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == HTok::Kind::word && peek(k).text == w;
  }
  bool is_punct(std::string_view p) const { return peek().kind == HTok::Kind::punct && peek().text == p; }
  bool accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    ++pos_;
    return true;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }

  Scope scope() {
    Scope s;
    if (accept_word("globally")) {
      s.kind = ScopeKind::globally;
    } else if (accept_word("after")) {
      s.activator = event();
      s.kind = ScopeKind::after;
      if (accept_word("until")) {
        s.terminator = event();
        s.kind = ScopeKind::after_until;
      }
    } else if (accept_word("until")) {
      s.terminator = event();
      s.kind = ScopeKind::until;
    } else {
      fail("expected a scope (globally, after, until)");
    }
    return s;
  }

  Pattern pattern() {
    Pattern p;
    if (accept_word("no")) {
      p.kind = PatternKind::absence;
      p.event_a = event();
    } else if (accept_word("some")) {
      p.kind = PatternKind::existence;
      p.event_a = event();
    } else {
      p.event_a = event();
      if (accept_word("causes")) {
        p.kind = PatternKind::response;
      } else if (accept_word("forbids")) {
        p.kind = PatternKind::prevention;
      } else if (accept_word("requires")) {
        p.kind = PatternKind::requirement;
      } else {
        fail("expected 'causes', 'forbids' or 'requires'");
      }
      p.event_b = event();
    }
    if (is_word("within")) {
      if (!is_binary(p.kind)) fail("a deadline is only allowed on causes, forbids and requires");
      ++pos_;
      if (peek().kind != HTok::Kind::number) fail("expected a duration");
      Rational value;
      try {
        value = Rational::parse(peek().text);
      } catch (const Error&) {
        fail("malformed duration");
      }
      if (value < Rational(0)) fail("deadline must not be negative");
      ++pos_;
      if (accept_word("s")) {
        p.deadline = value;
      } else if (accept_word("ms")) {
        p.deadline = value * Rational(1, 1000);
      } else {
        fail("expected time unit 's' or 'ms'");
      }
    }
    return p;
  }

  Event event() {
    if (peek().kind != HTok::Kind::channel) fail("expected a channel name starting with '/'");
    Event e;
    e.channel = peek().text;
    if (e.channel.size() > 1 && e.channel.back() == '/') fail("channel name must not end with '/'");
    ++pos_;
    if (accept("{")) {
      e.predicate = pred();
      expect("}");
    }
    return e;
  }

  static PredRef node(Pred::Op op, std::vector<PredRef> args) {
    auto p = std::make_shared<Pred>();
    p->op = op;
    p->args = std::move(args);
    return p;
  }

  PredRef pred() { return implies(); }
  PredRef implies() {
    auto lhs = disjunction();
    if (accept_word("implies")) return node(Pred::Op::implies, {lhs, implies()});
    return lhs;
  }
  PredRef disjunction() {
    auto lhs = conjunction();
    while (accept_word("or")) lhs = node(Pred::Op::or_, {lhs, conjunction()});
    return lhs;
  }
  PredRef conjunction() {
    auto lhs = negation();
    while (accept_word("and")) lhs = node(Pred::Op::and_, {lhs, negation()});
    return lhs;
  }
  PredRef negation() {
    if (accept_word("not")) return node(Pred::Op::not_, {negation()});
    return comparison();
  }
  PredRef comparison() {
    if (accept("(")) {
      auto inner = pred();
      expect(")");
      return inner;
    }
    auto lhs = operand();
    static const std::pair<const char*, Pred::Op> ops[] = {{"=", Pred::Op::eq}, {"!=", Pred::Op::ne},
                                                           {"<=", Pred::Op::le}, {">=", Pred::Op::ge},
                                                           {"<", Pred::Op::lt},  {">", Pred::Op::gt}};
    for (const auto& [text, op] : ops) {
      if (accept(text)) return node(op, {lhs, operand()});
    }
    if (accept_word("in")) {
      if (accept("{")) {
        std::vector<PredRef> args{lhs};
        do {
          args.push_back(literal());
        } while (accept(","));
        expect("}");
        return node(Pred::Op::in_set, std::move(args));
      }
      if (accept("[")) {
        auto lo = literal();
        expect(",");
        auto hi = literal();
        expect("]");
        if (!lo->literal.is_numeric() || !hi->literal.is_numeric()) fail("range bounds must be numbers");
        return node(Pred::Op::in_range, {lhs, lo, hi});
      }
      fail("expected '{' or '[' after 'in'");
    }
    return lhs;
  }
  PredRef operand() {
    if (peek().kind == HTok::Kind::word && !keywords().contains(peek().text)) return field();
    return literal();
  }
  PredRef field() {
    auto p = std::make_shared<Pred>();
    p->op = Pred::Op::field;
    p->field.push_back(peek().text);
    ++pos_;
    for (;;) {
      if (accept(".")) {
        if (peek().kind != HTok::Kind::word || keywords().contains(peek().text)) fail("expected a field name");
        p->field.push_back(peek().text);
        ++pos_;
      } else if (is_punct("[") && peek(1).kind == HTok::Kind::number) {
        ++pos_;
        std::size_t idx = 0;
        const std::string& t = peek().text;
        auto r = std::from_chars(t.data(), t.data() + t.size(), idx);
        if (r.ec != std::errc{} || r.ptr != t.data() + t.size()) fail("array index must be a non-negative integer");
        ++pos_;
        expect("]");
        p->field.push_back(idx);
      } else {
        break;
      }
    }
    return p;
  }
  PredRef literal() {
    auto p = std::make_shared<Pred>();
    p->op = Pred::Op::literal;
    const HTok& t = peek();
    if (t.kind == HTok::Kind::number) {
      if (t.text.find_first_of(".eE") == std::string::npos) {
        std::int64_t v = 0;
        auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (r.ec != std::errc{}) fail("integer literal out of range");
        p->literal.value = v;
      } else {
        p->literal.value = std::stod(t.text);
      }
    } else if (t.kind == HTok::Kind::string) {
      p->literal.value = t.text;
    } else if (t.kind == HTok::Kind::word && (t.text == "true" || t.text == "false")) {
      p->literal.value = t.text == "true";
    } else {
      fail(t.kind == HTok::Kind::end ? "unexpected end of property" : "unexpected '" + t.text + "'");
    }
    ++pos_;
    return p;
  }

  std::vector<HTok> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printer

int precedence(Pred::Op op) {
  switch (op) {
    case Pred::Op::implies: return 1;
    case Pred::Op::or_: return 2;
    case Pred::Op::and_: return 3;
    case Pred::Op::not_: return 4;
    case Pred::Op::field:
    case Pred::Op::literal: return 6;
    default: return 5;
  }
}

std::string print_literal(const Literal& l) {
  if (auto b = std::get_if<bool>(&l.value)) return *b ? "true" : "false";
  if (auto i = std::get_if<std::int64_t>(&l.value)) return std::to_string(*i);
  if (auto d = std::get_if<double>(&l.value)) {
    std::string s = nlohmann::json(*d).dump();
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  std::string out = "\"";
  for (char c : std::get<std::string>(l.value)) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string print_child(const Pred& child, int parent_prec, bool wrap_equal) {
  std::string s = print_pred(child);
  int p = precedence(child.op);
  if (p < parent_prec || (p == parent_prec && wrap_equal)) return "(" + s + ")";
  return s;
}

std::string print_event(const Event& e) {
  if (!e.predicate) return e.channel;
  return e.channel + " {" + print_pred(*e.predicate) + "}";
}

// ------------------------------------------------------------- evaluation

const nlohmann::json* resolve(const nlohmann::json& payload, const FieldPath& path) {
  const nlohmann::json* cur = &payload;
  for (const auto& step : path) {
    if (auto name = std::get_if<std::string>(&step)) {
      if (!cur->is_object()) return nullptr;
      auto it = cur->find(*name);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else {
      std::size_t idx = std::get<std::size_t>(step);
      if (!cur->is_array() || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    }
  }
  return cur;
}

struct Operand {
  const nlohmann::json* json = nullptr;
  const Literal* literal = nullptr;
};

Operand operand_of(const Pred& p, const nlohmann::json& payload) {
  if (p.op == Pred::Op::field) return {resolve(payload, p.field), nullptr};
  if (p.op == Pred::Op::literal) return {nullptr, &p.literal};
  return {};
}

// Comparable scalar view of an operand.
using Scalar = std::variant<std::monostate, bool, long double, std::string>;

Scalar scalar(const Operand& o) {
  if (o.json != nullptr) {
    const auto& j = *o.json;
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer() && !j.is_number_unsigned()) return static_cast<long double>(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return static_cast<long double>(j.get<std::uint64_t>());
    if (j.is_number_float()) return static_cast<long double>(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    return {};
  }
  if (o.literal != nullptr) {
    const auto& v = o.literal->value;
    if (auto b = std::get_if<bool>(&v)) return *b;
    if (auto s = std::get_if<std::string>(&v)) return *s;
    return o.literal->as_number();
  }
  return {};
}

bool compare(Pred::Op op, const Scalar& a, const Scalar& b) {
  if (a.index() == 0 || b.index() == 0 || a.index() != b.index()) return false;
  int cmp = 0;
  if (auto x = std::get_if<long double>(&a)) {
    long double y = std::get<long double>(b);
    cmp = *x < y ? -1 : (*x > y ? 1 : 0);
  } else if (auto s = std::get_if<std::string>(&a)) {
    int c = s->compare(std::get<std::string>(b));
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
  } else {
    if (op != Pred::Op::eq && op != Pred::Op::ne) return false;
    cmp = std::get<bool>(a) == std::get<bool>(b) ? 0 : 1;
  }
  switch (op) {
    case Pred::Op::eq: return cmp == 0;
    case Pred::Op::ne: return cmp != 0;
    case Pred::Op::lt: return cmp < 0;
    case Pred::Op::le: return cmp <= 0;
    case Pred::Op::gt: return cmp > 0;
    case Pred::Op::ge: return cmp >= 0;
    default: return false;
  }
}

// ------------------------------------------------------------- typechecks

enum class OperandType { boolean, numeric, string, other };

const char* describe(OperandType t) {
  switch (t) {
    case OperandType::boolean: return "bool";
    case OperandType::numeric: return "number";
    case OperandType::string: return "string";
    case OperandType::other: return "non-scalar";
  }
  return "non-scalar";
}

OperandType literal_type(const Literal& l) {
  if (std::holds_alternative<bool>(l.value)) return OperandType::boolean;
  if (std::holds_alternative<std::string>(l.value)) return OperandType::string;
  return OperandType::numeric;
}

OperandType declared_type(const FieldType& t) {
  if (t.is_array || !t.is_builtin()) return OperandType::other;
  Builtin b = t.builtin();
  if (b == Builtin::bool_) return OperandType::boolean;
  if (b == Builtin::string) return OperandType::string;
  return OperandType::numeric;
}

class TypeChecker {
 public:
  TypeChecker(const MessageTypeDef& type, const MsgIndex& msgs, std::string channel, IssueScope scope,
              IssueList& out)
      : type_(type), msgs_(msgs), channel_(std::move(channel)), scope_(std::move(scope)), out_(out) {}

  void check_boolean(const Pred& p) {
    switch (p.op) {
      case Pred::Op::not_: check_boolean(*p.args[0]); return;
      case Pred::Op::and_:
      case Pred::Op::or_:
      case Pred::Op::implies:
        check_boolean(*p.args[0]);
        check_boolean(*p.args[1]);
        return;
      case Pred::Op::field:
      case Pred::Op::literal: {
        auto t = operand(p);
        if (t && *t != OperandType::boolean) {
          error("operand " + print_pred(p) + " of type " + describe(*t) + " used as a condition");
        }
        return;
      }
      case Pred::Op::in_set: {
        auto lhs = operand(*p.args[0]);
        for (std::size_t i = 1; i < p.args.size() && lhs; ++i) {
          auto t = operand(*p.args[i]);
          if (t && *t != *lhs) mismatch(p, *lhs, *t);
        }
        return;
      }
      case Pred::Op::in_range: {
        auto lhs = operand(*p.args[0]);
        if (lhs && *lhs != OperandType::numeric) {
          error("range membership needs a number, " + print_pred(*p.args[0]) + " is " + describe(*lhs));
        }
        return;
      }
      default: {
        auto a = operand(*p.args[0]);
        auto b = operand(*p.args[1]);
        if (!a || !b) return;
        if (*a != *b || *a == OperandType::other) {
          mismatch(p, *a, *b);
        } else if (*a == OperandType::boolean && p.op != Pred::Op::eq && p.op != Pred::Op::ne) {
          error("ordering comparison on bool in " + print_pred(p));
        }
      }
    }
  }

 private:
  std::optional<OperandType> operand(const Pred& p) {
    if (p.op == Pred::Op::literal) return literal_type(p.literal);
    if (p.op != Pred::Op::field) {
      check_boolean(p);
      return OperandType::boolean;
    }
    auto ft = field_type(type_, p.field, msgs_);
    if (!ft) {
      error("unknown field '" + to_string(p.field) + "' in type " + type_.qualified_name + " of " + channel_);
      return std::nullopt;
    }
    return declared_type(*ft);
  }

  void mismatch(const Pred& p, OperandType a, OperandType b) {
    error(std::string("incompatible operands in ") + print_pred(p) + ": " + describe(a) + " and " + describe(b));
  }

  void error(const std::string& msg) {
    out_.push_back(make_issue(Severity::error, Category::typecheck, "hpl-type", scope_, msg));
  }

  const MessageTypeDef& type_;
  const MsgIndex& msgs_;
  std::string channel_;
  IssueScope scope_;
  IssueList& out_;
};

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

HplProperty parse_property(const std::string& text) {
  Parser p(text);
  return p.property(text);
}

std::string print_pred(const Pred& p) {
  switch (p.op) {
    case Pred::Op::field: return to_string(p.field);
    case Pred::Op::literal: return print_literal(p.literal);
    case Pred::Op::not_: return "not " + print_child(*p.args[0], precedence(p.op), false);
    case Pred::Op::and_:
    case Pred::Op::or_:
      return print_child(*p.args[0], precedence(p.op), false) + (p.op == Pred::Op::and_ ? " and " : " or ") +
             print_child(*p.args[1], precedence(p.op), true);
    case Pred::Op::implies:
      return print_child(*p.args[0], precedence(p.op), true) + " implies " +
             print_child(*p.args[1], precedence(p.op), false);
    case Pred::Op::in_set: {
      std::string s = print_child(*p.args[0], 6, false) + " in {";
      for (std::size_t i = 1; i < p.args.size(); ++i) s += (i > 1 ? ", " : "") + print_pred(*p.args[i]);
      return s + "}";
    }
    case Pred::Op::in_range:
      return print_child(*p.args[0], 6, false) + " in [" + print_pred(*p.args[1]) + ", " +
             print_pred(*p.args[2]) + "]";
    default: {
      static const std::map<Pred::Op, const char*> ops{{Pred::Op::eq, " = "},  {Pred::Op::ne, " != "},
                                                       {Pred::Op::lt, " < "},  {Pred::Op::le, " <= "},
                                                       {Pred::Op::gt, " > "},  {Pred::Op::ge, " >= "}};
      return print_child(*p.args[0], 6, false) + ops.at(p.op) + print_child(*p.args[1], 6, false);
    }
  }
}

std::string print_property(const HplProperty& p) {
  std::string out;
  switch (p.scope.kind) {
    case ScopeKind::globally: out = "globally"; break;
    case ScopeKind::after: out = "after " + print_event(*p.scope.activator); break;
    case ScopeKind::until: out = "until " + print_event(*p.scope.terminator); break;
    case ScopeKind::after_until:
      out = "after " + print_event(*p.scope.activator) + " until " + print_event(*p.scope.terminator);
      break;
  }
  out += ": ";
  switch (p.pattern.kind) {
    case PatternKind::absence: out += "no " + print_event(p.pattern.event_a); break;
    case PatternKind::existence: out += "some " + print_event(p.pattern.event_a); break;
    default: {
      const char* verb = p.pattern.kind == PatternKind::response     ? " causes "
                         : p.pattern.kind == PatternKind::prevention ? " forbids "
                                                                     : " requires ";
      out += print_event(p.pattern.event_a) + verb + print_event(*p.pattern.event_b);
      if (p.pattern.deadline) out += " within " + p.pattern.deadline->to_string() + " s";
    }
  }
  return out;
}

bool eval_pred(const Pred& p, const nlohmann::json& payload) {
  switch (p.op) {
    case Pred::Op::not_: return !eval_pred(*p.args[0], payload);
    case Pred::Op::and_: return eval_pred(*p.args[0], payload) && eval_pred(*p.args[1], payload);
    case Pred::Op::or_: return eval_pred(*p.args[0], payload) || eval_pred(*p.args[1], payload);
    case Pred::Op::implies: return !eval_pred(*p.args[0], payload) || eval_pred(*p.args[1], payload);
    case Pred::Op::field:
    case Pred::Op::literal: {
      Scalar s = scalar(operand_of(p, payload));
      auto b = std::get_if<bool>(&s);
      return b != nullptr && *b;
    }
    case Pred::Op::in_set: {
      Scalar v = scalar(operand_of(*p.args[0], payload));
      for (std::size_t i = 1; i < p.args.size(); ++i) {
        if (compare(Pred::Op::eq, v, scalar(operand_of(*p.args[i], payload)))) return true;
      }
      return false;
    }
    case Pred::Op::in_range: {
      Scalar v = scalar(operand_of(*p.args[0], payload));
      return compare(Pred::Op::ge, v, scalar(operand_of(*p.args[1], payload))) &&
             compare(Pred::Op::le, v, scalar(operand_of(*p.args[2], payload)));
    }
    default: {
      auto side = [&](const Pred& q) -> Scalar {
        if (q.op == Pred::Op::field || q.op == Pred::Op::literal) return scalar(operand_of(q, payload));
        return eval_pred(q, payload);
      };
      return compare(p.op, side(*p.args[0]), side(*p.args[1]));
    }
  }
}

bool matches(const Event& e, const std::string& channel, const nlohmann::json& payload) {
  if (e.channel != channel) return false;
  return !e.predicate || eval_pred(*e.predicate, payload);
}

std::vector<std::string> channels(const HplProperty& p) {
  std::set<std::string> out{p.pattern.event_a.channel};
  if (p.pattern.event_b) out.insert(p.pattern.event_b->channel);
  if (p.scope.activator) out.insert(p.scope.activator->channel);
  if (p.scope.terminator) out.insert(p.scope.terminator->channel);
  return {out.begin(), out.end()};
}

std::vector<PropertyEntry> load_properties(const std::filesystem::path& path, const std::string& display,
                                           IssueList& issues) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read properties file " + display);
  std::vector<PropertyEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = strip_comment(line);
    auto b = body.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = body.find_last_not_of(" \t\r");
    body = body.substr(b, e - b + 1);
    try {
      out.push_back({parse_property(body), {display, line_no}});
    } catch (const ParseError& err) {
      issues.push_back(make_issue(Severity::error, Category::hpl, "syntax", FileScope{{display, line_no}},
                                  std::string("malformed property: ") + err.what()));
    }
  }
  return out;
}

std::optional<FieldType> field_type(const MessageTypeDef& t, const FieldPath& path, const MsgIndex& msgs) {
  const MessageTypeDef* cur = &t;
  std::optional<FieldType> ft;
  for (const auto& step : path) {
    if (auto name = std::get_if<std::string>(&step)) {
      if (ft) {
        if (ft->is_array || ft->is_builtin()) return std::nullopt;
        auto it = msgs.find(ft->nested());
        if (it == msgs.end()) return std::nullopt;
        cur = &it->second;
      }
      const MsgField* f = cur->field(*name);
      if (f == nullptr) return std::nullopt;
      ft = f->type;
    } else {
      if (!ft || !ft->is_array) return std::nullopt;
      if (ft->fixed_size && std::get<std::size_t>(step) >= *ft->fixed_size) return std::nullopt;
      ft->is_array = false;
      ft->fixed_size.reset();
    }
  }
  return ft;
}

IssueList typecheck_property(const HplProperty& p, const RosGraph& g, const MsgIndex& msgs,
                             const std::optional<SourceLoc>& loc) {
  IssueList out;
  std::vector<const Event*> events{&p.pattern.event_a};
  if (p.pattern.event_b) events.push_back(&*p.pattern.event_b);
  if (p.scope.activator) events.push_back(&*p.scope.activator);
  if (p.scope.terminator) events.push_back(&*p.scope.terminator);

  std::set<std::string> warned;
  for (const Event* e : events) {
    IssueScope scope = loc ? IssueScope(FileScope{*loc}) : IssueScope(EntityScope{e->channel});
    const ChannelResource* topic = g.topic(e->channel);
    if (topic == nullptr) {
      if (warned.insert(e->channel).second) {
        out.push_back(make_issue(Severity::warning, Category::typecheck, "hpl-channel", scope,
                                 "channel " + e->channel + " is not a topic of configuration " + g.configuration));
      }
      continue;
    }
    if (!e->predicate) continue;
    if (!topic->msg_type.known()) {
      if (warned.insert(e->channel).second) {
        out.push_back(make_issue(Severity::warning, Category::typecheck, "hpl-channel", scope,
                                 "type of channel " + e->channel + " is unknown; predicate not checked"));
      }
      continue;
    }
    auto it = msgs.find(topic->msg_type.value());
    if (it == msgs.end()) {
      out.push_back(make_issue(Severity::warning, Category::typecheck, "hpl-channel", scope,
                               "message type " + topic->msg_type.value() + " of " + e->channel + " is not defined"));
      continue;
    }
    TypeChecker(it->second, msgs, e->channel, scope, out).check_boolean(*e->predicate);
  }
  return out;
}

}  // namespace rosa
