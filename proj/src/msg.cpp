#include "rosa/msg.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace rosa {

namespace {

struct BuiltinName {
  std::string_view name;
  Builtin type;
};

constexpr BuiltinName kBuiltins[] = {
    {"bool", Builtin::bool_},     {"int8", Builtin::int8},       {"int16", Builtin::int16},
    {"int32", Builtin::int32},    {"int64", Builtin::int64},     {"uint8", Builtin::uint8},
    {"uint16", Builtin::uint16},  {"uint32", Builtin::uint32},   {"uint64", Builtin::uint64},
    {"float32", Builtin::float32}, {"float64", Builtin::float64}, {"string", Builtin::string},
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

FieldType parse_field_type(const std::string& token, const std::string& package,
                           const SourceLoc& loc) {
  FieldType type;
  std::string base = token;
  if (auto open = token.find('['); open != std::string::npos) {
    if (token.back() != ']') throw ParseError(loc, "malformed array type '" + token + "'");
    std::string size = token.substr(open + 1, token.size() - open - 2);
    base = token.substr(0, open);
    type.is_array = true;
    if (!size.empty()) {
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(size.data(), size.data() + size.size(), n);
      if (ec != std::errc{} || ptr != size.data() + size.size()) {
        throw ParseError(loc, "malformed array size in '" + token + "'");
      }
      type.fixed_size = n;
    }
  }
  if (auto builtin = parse_builtin(base)) {
    type.base = *builtin;
    return type;
  }
  if (base == "Header") {
    type.base = std::string("std_msgs/Header");
    return type;
  }
  if (auto slash = base.find('/'); slash != std::string::npos) {
    if (!valid_identifier(base.substr(0, slash)) || !valid_identifier(base.substr(slash + 1))) {
      throw ParseError(loc, "malformed type '" + base + "'");
    }
    type.base = base;
    return type;
  }
  if (!valid_identifier(base) || std::islower(static_cast<unsigned char>(base[0]))) {
    throw ParseError(loc, "unknown builtin type '" + base + "'");
  }
  type.base = package + "/" + base;
  return type;
}

}  // namespace

std::optional<Builtin> parse_builtin(std::string_view token) {
  for (const auto& b : kBuiltins) {
    if (b.name == token) return b.type;
  }
  return std::nullopt;
}

const char* to_string(Builtin b) {
  for (const auto& entry : kBuiltins) {
    if (entry.type == b) return entry.name.data();
  }
  return "?";
}

bool is_integer(Builtin b) {
  return b != Builtin::bool_ && b != Builtin::string && !is_float(b);
}
bool is_float(Builtin b) { return b == Builtin::float32 || b == Builtin::float64; }
bool is_numeric(Builtin b) { return is_integer(b) || is_float(b); }

std::pair<long double, long double> integer_bounds(Builtin b) {
  switch (b) {
    case Builtin::int8: return {-128.0L, 127.0L};
    case Builtin::int16: return {-32768.0L, 32767.0L};
    case Builtin::int32: return {-2147483648.0L, 2147483647.0L};
    case Builtin::int64:
      return {static_cast<long double>(std::numeric_limits<std::int64_t>::min()),
              static_cast<long double>(std::numeric_limits<std::int64_t>::max())};
    case Builtin::uint8: return {0.0L, 255.0L};
    case Builtin::uint16: return {0.0L, 65535.0L};
    case Builtin::uint32: return {0.0L, 4294967295.0L};
    case Builtin::uint64:
      return {0.0L, static_cast<long double>(std::numeric_limits<std::uint64_t>::max())};
    default: return {0.0L, 0.0L};
  }
}

std::string to_string(const FieldType& t) {
  std::string out = t.is_builtin() ? to_string(t.builtin()) : t.nested();
  if (t.is_array) {
    out += "[";
    if (t.fixed_size) out += std::to_string(*t.fixed_size);
    out += "]";
  }
  return out;
}

const MsgField* MessageTypeDef::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

MessageTypeDef parse_msg_text(const std::string& text, const std::string& qualified_name,
                              const std::string& display_name) {
  MessageTypeDef def;
  def.qualified_name = qualified_name;
  const std::string package = qualified_name.substr(0, qualified_name.find('/'));
  std::set<std::string> names;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    SourceLoc loc{display_name, line_no};
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    auto ws = line.find_first_of(" \t");
    if (ws == std::string::npos) throw ParseError(loc, "expected 'type name'");
    std::string type_token = line.substr(0, ws);
    std::string rest = trim(std::string_view(line).substr(ws));
    FieldType type = parse_field_type(type_token, package, loc);

    if (auto eq = rest.find('='); eq != std::string::npos) {
      std::string name = trim(std::string_view(rest).substr(0, eq));
      std::string value = rest.substr(eq + 1);
      if (!(type.is_builtin() && type.builtin() == Builtin::string)) {
        value = value.substr(0, value.find('#'));
      }
      value = trim(value);
      if (!valid_identifier(name)) throw ParseError(loc, "malformed constant name '" + name + "'");
      if (!type.is_builtin() || type.is_array) {
        throw ParseError(loc, "constants must have a scalar builtin type");
      }
      if (!names.insert(name).second) throw ParseError(loc, "duplicate name '" + name + "'");
      def.constants.push_back({name, type, value});
      continue;
    }

    std::string name = trim(rest.substr(0, rest.find('#')));
    if (!valid_identifier(name)) throw ParseError(loc, "malformed field name '" + name + "'");
    if (!names.insert(name).second) throw ParseError(loc, "duplicate field name '" + name + "'");
    def.fields.push_back({name, type});
  }
  return def;
}

MessageTypeDef parse_msg_file(const std::filesystem::path& path, const std::string& package) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_msg_text(buf.str(), package + "/" + path.stem().string(),
                        package + "/msg/" + path.filename().string());
}

const MsgIndex& builtin_messages() {
  static const MsgIndex index = [] {
    MsgIndex idx;
    auto add = [&](const std::string& name, const std::string& text) {
      idx.emplace(name, parse_msg_text(text, name, name));
    };
    add("std_msgs/Bool", "bool data\n");
    add("std_msgs/Int32", "int32 data\n");
    add("std_msgs/Float64", "float64 data\n");
    add("std_msgs/String", "string data\n");
    add("std_msgs/Empty", "");
    return idx;
  }();
  return index;
}

IssueList check_nested_types(const MsgIndex& index) {
  IssueList issues;
  for (const auto& [name, def] : index) {
    for (const auto& field : def.fields) {
      if (field.type.is_builtin() || index.contains(field.type.nested())) continue;
      issues.push_back(make_issue(Severity::error, Category::indexing, "msg-type",
                                  EntityScope{name},
                                  "field '" + field.name + "' of " + name +
                                      " has unresolvable type '" + field.type.nested() + "'"));
    }
  }
  return issues;
}

std::optional<std::string> lookup_short_name(const MsgIndex& index, std::string_view short_name) {
  std::optional<std::string> found;
  for (const auto& [name, def] : index) {
    auto slash = name.find('/');
    if (name.substr(slash + 1) != short_name) continue;
    if (found) return std::nullopt;
    found = name;
  }
  return found;
}

}  // namespace rosa
