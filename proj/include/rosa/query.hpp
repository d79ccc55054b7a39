#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rosa/core.hpp"
#include "rosa/graph.hpp"

namespace rosa {

enum class EntityKind { node, topic, service, parameter, link };

const char* to_string(EntityKind k);

/// Half-open character range in the query text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

class QuerySyntaxError : public Error {
 public:
  QuerySyntaxError(Span span, const std::string& message);
  const Span& span() const { return span_; }

 private:
  Span span_;
};

struct PredExpr;
using PredPtr = std::shared_ptr<const PredExpr>;

struct PredExpr {
  enum class Op { attr, number, string, boolean, exists, not_, and_, or_, eq, ne, lt, le, gt, ge };
  Op op = Op::boolean;
  std::string text;  // attribute name or string literal
  double number = 0;
  bool flag = false;
  std::vector<PredPtr> args;
  Span span;
};

struct PathStep {
  std::string name;  // root collection or navigation step
  EntityKind kind = EntityKind::node;  // entity kind after the step
  std::vector<PredPtr> filters;
  Span span;
};

struct QueryPath {
  std::vector<PathStep> steps;  // steps[0] is the root
  EntityKind result_kind() const { return steps.back().kind; }
};

struct QueryExpr {
  std::string text;
  std::vector<QueryPath> alternatives;  // union
};

struct Query {
  std::string name;
  Severity severity = Severity::warning;
  QueryExpr expr;
  std::string message_template;
};

struct Match {
  std::string entity;
  EntityKind kind = EntityKind::node;
  std::map<std::string, std::string> bindings;

  bool operator==(const Match&) const = default;
};

/// Parses a query expression; unknown roots, steps and attributes throw
/// QuerySyntaxError with the offending span.
QueryExpr parse_query(const std::string& text);

/// Builds a query and validates the message placeholders.
Query make_query(std::string name, Severity severity, const std::string& expression, std::string message);

/// Matches in entity-name order. Missing attributes never match.
std::vector<Match> eval_query(const QueryExpr& q, const RosGraph& g);

std::string render_template(const std::string& tmpl, const Match& m);

/// Evaluates a query and renders one issue per match.
IssueList run_query(const Query& q, const RosGraph& g);

/// A structured list of {name, severity, expression, message} records.
std::vector<Query> load_query_file(const std::filesystem::path& path);

/// R1 topic types, R2 service types, R3 multiple publishers, R4 conditional
/// publishers/subscribers, R5 orphan topics, R6 unresolved entities.
IssueList builtin_rules(const RosGraph& g);

/// Names of the attributes defined for an entity kind.
const std::vector<std::string>& entity_attributes(EntityKind k);

}  // namespace rosa
