#pragma once

// Shared vocabulary: source locations, issues, errors, and values that may be
// statically unknown.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rosa {

struct SourceLoc {
  std::string file;  // workspace-relative where possible
  int line = 0;

  bool operator==(const SourceLoc&) const = default;
  auto operator<=>(const SourceLoc&) const = default;
};

std::string to_string(const SourceLoc& loc);

/// A value that static analysis may fail to determine. When unknown, `text`
/// keeps the original expression for reporting.
template <typename T>
class Unknowable {
 public:
  Unknowable() = default;
  Unknowable(T value) : value_(std::move(value)) {}  // NOLINT(implicit)

  static Unknowable unknown(std::string text = {}) {
    Unknowable u;
    u.text_ = std::move(text);
    return u;
  }

  bool known() const { return value_.has_value(); }
  const T& value() const { return *value_; }
  const std::optional<T>& get() const { return value_; }
  const std::string& text() const { return text_; }

  bool operator==(const Unknowable&) const = default;

 private:
  std::optional<T> value_;
  std::string text_;
};

enum class Severity { error, warning, info };
enum class Category { model, query, typecheck, hpl, runtime, testing, indexing };

const char* to_string(Severity s);
const char* to_string(Category c);
std::optional<Severity> parse_severity(std::string_view s);

struct PackageScope {
  std::string package;
  bool operator==(const PackageScope&) const = default;
};
struct FileScope {
  SourceLoc loc;
  bool operator==(const FileScope&) const = default;
};
struct ConfigurationScope {
  std::string configuration;
  bool operator==(const ConfigurationScope&) const = default;
};
struct EntityScope {
  std::string entity;
  bool operator==(const EntityScope&) const = default;
};

using IssueScope = std::variant<std::monostate, PackageScope, FileScope,
                                ConfigurationScope, EntityScope>;

/// A single finding. Every analysis stage reports through this type; ids are
/// assigned when the report is assembled.
struct Issue {
  std::string id;
  Severity severity = Severity::info;
  Category category = Category::model;
  std::string rule;
  IssueScope scope;
  std::string message;

  bool operator==(const Issue&) const = default;
};

using IssueList = std::vector<Issue>;

Issue make_issue(Severity severity, Category category, std::string rule,
                 IssueScope scope, std::string message);

/// Assigns ids of the form category:rule:ordinal in list order.
void assign_issue_ids(IssueList& issues);

bool has_errors(const IssueList& issues);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. Carries the location of the offending text.
class ParseError : public Error {
 public:
  ParseError(SourceLoc loc, const std::string& message);
  const SourceLoc& loc() const { return loc_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceLoc loc_;
  std::string detail_;
};

/// Well-formed input that breaks a structural rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rosa
