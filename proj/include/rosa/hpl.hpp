#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rosa/core.hpp"
#include "rosa/graph.hpp"
#include "rosa/msg.hpp"
#include "rosa/rational.hpp"

namespace rosa {

/// Dotted field path; integer steps index arrays.
using FieldPath = std::vector<std::variant<std::string, std::size_t>>;

std::string to_string(const FieldPath& path);

struct Literal {
  std::variant<bool, std::int64_t, double, std::string> value;

  bool is_numeric() const { return value.index() == 1 || value.index() == 2; }
  long double as_number() const;
  bool operator==(const Literal&) const = default;
};

struct Pred;
using PredRef = std::shared_ptr<const Pred>;

struct Pred {
  enum class Op { field, literal, eq, ne, lt, le, gt, ge, in_set, in_range, not_, and_, or_, implies };
  Op op = Op::literal;
  FieldPath field;             // op == field
  Literal literal;             // op == literal
  std::vector<PredRef> args;   // operands; in_set/in_range: args[0] then literals
};

bool structurally_equal(const Pred& a, const Pred& b);

struct Event {
  std::string channel;
  PredRef predicate;  // may be null

  bool operator==(const Event& o) const;
};

enum class ScopeKind { globally, after, until, after_until };
enum class PatternKind { absence, existence, response, prevention, requirement };

const char* to_string(ScopeKind k);
const char* to_string(PatternKind k);
bool is_binary(PatternKind k);

struct Scope {
  ScopeKind kind = ScopeKind::globally;
  std::optional<Event> activator;
  std::optional<Event> terminator;

  bool operator==(const Scope&) const = default;
};

struct Pattern {
  PatternKind kind = PatternKind::absence;
  Event event_a;
  std::optional<Event> event_b;
  std::optional<Rational> deadline;

  bool operator==(const Pattern&) const = default;
};

struct HplProperty {
  Scope scope;
  Pattern pattern;
  std::string source_text;

  /// AST equality; ignores source_text.
  bool same_ast(const HplProperty& o) const { return scope == o.scope && pattern == o.pattern; }
};

/// Throws ParseError; the message names the column.
HplProperty parse_property(const std::string& text);

std::string print_pred(const Pred& p);
std::string print_property(const HplProperty& p);

/// Predicate truth over a message payload. A missing field makes the
/// comparison false.
bool eval_pred(const Pred& p, const nlohmann::json& payload);
bool matches(const Event& e, const std::string& channel, const nlohmann::json& payload);

/// Every channel mentioned by the property, sorted and unique.
std::vector<std::string> channels(const HplProperty& p);

struct PropertyEntry {
  HplProperty property;
  SourceLoc loc;
  std::string id() const { return loc.file + ":" + std::to_string(loc.line); }
};

/// One property per line; "#" starts a comment. Malformed lines become hpl
/// error issues and are skipped.
std::vector<PropertyEntry> load_properties(const std::filesystem::path& path, const std::string& display,
                                           IssueList& issues);

/// Channel presence (warning), field existence and operand compatibility
/// (errors).
IssueList typecheck_property(const HplProperty& p, const RosGraph& g, const MsgIndex& msgs,
                             const std::optional<SourceLoc>& loc = std::nullopt);

/// Resolves the declared type of a field path; nullopt when it does not exist.
std::optional<FieldType> field_type(const MessageTypeDef& t, const FieldPath& path, const MsgIndex& msgs);

}  // namespace rosa
