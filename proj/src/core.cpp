#include "rosa/core.hpp"

#include <map>

namespace rosa {

std::string to_string(const SourceLoc& loc) {
  if (loc.line > 0) return loc.file + ":" + std::to_string(loc.line);
  return loc.file;
}

const char* to_string(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::info: return "info";
  }
  return "info";
}

const char* to_string(Category c) {
  switch (c) {
    case Category::model: return "model";
    case Category::query: return "query";
    case Category::typecheck: return "typecheck";
    case Category::hpl: return "hpl";
    case Category::runtime: return "runtime";
    case Category::testing: return "testing";
    case Category::indexing: return "indexing";
  }
  return "model";
}

std::optional<Severity> parse_severity(std::string_view s) {
  if (s == "error") return Severity::error;
  if (s == "warning") return Severity::warning;
  if (s == "info") return Severity::info;
  return std::nullopt;
}

Issue make_issue(Severity severity, Category category, std::string rule,
                 IssueScope scope, std::string message) {
  Issue issue;
  issue.severity = severity;
  issue.category = category;
  issue.rule = std::move(rule);
  issue.scope = std::move(scope);
  issue.message = std::move(message);
  return issue;
}

void assign_issue_ids(IssueList& issues) {
  std::map<std::string, int> ordinals;
  for (auto& issue : issues) {
    std::string key = std::string(to_string(issue.category)) + ":" + issue.rule;
    issue.id = key + ":" + std::to_string(++ordinals[key]);
  }
}

bool has_errors(const IssueList& issues) {
  for (const auto& issue : issues) {
    if (issue.severity == Severity::error) return true;
  }
  return false;
}

ParseError::ParseError(SourceLoc loc, const std::string& message)
    : Error(to_string(loc) + ": " + message), loc_(std::move(loc)), detail_(message) {}

}  // namespace rosa
