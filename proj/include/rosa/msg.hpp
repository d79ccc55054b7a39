#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rosa/core.hpp"

namespace rosa {

enum class Builtin {
  bool_,
  int8,
  int16,
  int32,
  int64,
  uint8,
  uint16,
  uint32,
  uint64,
  float32,
  float64,
  string
};

std::optional<Builtin> parse_builtin(std::string_view token);
const char* to_string(Builtin b);
bool is_integer(Builtin b);
bool is_float(Builtin b);
bool is_numeric(Builtin b);

/// Inclusive integer bounds of an integer builtin.
std::pair<long double, long double> integer_bounds(Builtin b);

struct FieldType {
  std::variant<Builtin, std::string> base;  // builtin or nested "pkg/Type"
  bool is_array = false;
  std::optional<std::size_t> fixed_size;  // set for T[N]

  bool is_builtin() const { return std::holds_alternative<Builtin>(base); }
  Builtin builtin() const { return std::get<Builtin>(base); }
  const std::string& nested() const { return std::get<std::string>(base); }

  bool operator==(const FieldType&) const = default;
};

std::string to_string(const FieldType& t);

struct MsgField {
  std::string name;
  FieldType type;
  bool operator==(const MsgField&) const = default;
};

struct MsgConstant {
  std::string name;
  FieldType type;
  std::string literal;
  bool operator==(const MsgConstant&) const = default;
};

struct MessageTypeDef {
  std::string qualified_name;  // "pkg/Type"
  std::vector<MsgField> fields;
  std::vector<MsgConstant> constants;

  const MsgField* field(std::string_view name) const;
  bool operator==(const MessageTypeDef&) const = default;
};

using MsgIndex = std::map<std::string, MessageTypeDef>;

/// Parses message definition text. Nested types written without a package
/// are qualified with `package` ("Header" maps to std_msgs/Header).
MessageTypeDef parse_msg_text(const std::string& text, const std::string& qualified_name,
                              const std::string& display_name);

MessageTypeDef parse_msg_file(const std::filesystem::path& path, const std::string& package);

/// std_msgs Bool, Int32, Float64, String and Empty.
const MsgIndex& builtin_messages();

/// Reports nested field types that resolve to nothing in `index`.
IssueList check_nested_types(const MsgIndex& index);

/// Finds the unique type whose short name is `short_name`, if any.
std::optional<std::string> lookup_short_name(const MsgIndex& index, std::string_view short_name);

}  // namespace rosa
