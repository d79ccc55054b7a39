#include "rosa/extract.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "rosa/launch.hpp"

namespace rosa {

const char* to_string(CallKind k) {
  switch (k) {
    case CallKind::advertise: return "advertise";
    case CallKind::subscribe: return "subscribe";
    case CallKind::service_server: return "service_server";
    case CallKind::service_client: return "service_client";
    case CallKind::param_read: return "param_read";
    case CallKind::param_write: return "param_write";
  }
  return "advertise";
}

const char* to_string(Provenance p) { return p == Provenance::source ? "source" : "hint"; }

namespace {

const std::regex kMainGuard(R"re(if\s+__name__\s*==\s*["']__main__["']\s*:)re");

struct Token {
  enum class Kind { ident, number, string, punct };
  Kind kind;
  std::string text;
  int line;
  std::size_t begin;
  std::size_t end;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || v < 0) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------- C++ lexing

std::vector<Token> lex_cpp(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  bool line_start = true;
  auto bump = [&](std::size_t to) {
    for (; i < to && i < src.size(); ++i) {
      if (src[i] == '\n') ++line;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      line_start = true;
      bump(i + 1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(i + 1);
      continue;
    }
    if (line_start && c == '#') {
      // preprocessor directive, honouring line continuations
      std::size_t j = i;
      while (j < src.size() && !(src[j] == '\n' && src[j - 1] != '\\')) ++j;
      bump(j);
      continue;
    }
    line_start = false;
    if (src.compare(i, 2, "//") == 0) {
      std::size_t j = src.find('\n', i);
      bump(j == std::string::npos ? src.size() : j);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      std::size_t j = src.find("*/", i + 2);
      bump(j == std::string::npos ? src.size() : j + 2);
      continue;
    }
    const std::size_t begin = i;
    const int tok_line = line;
    if (c == '"' || c == '\'') {
      std::string text;
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != c && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size()) {
          ++j;
          char e = src[j];
          text += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          text += src[j];
        }
        ++j;
      }
      bump(j + 1);
      out.push_back({Token::Kind::string, text, tok_line, begin, i});
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      out.push_back({Token::Kind::ident, src.substr(i, j - i), tok_line, begin, j});
      bump(j);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && (is_ident_char(src[j]) || src[j] == '.')) ++j;
      out.push_back({Token::Kind::number, src.substr(i, j - i), tok_line, begin, j});
      bump(j);
      continue;
    }
    if (src.compare(i, 2, "::") == 0 || src.compare(i, 2, "->") == 0 || src.compare(i, 2, "&&") == 0 ||
        src.compare(i, 2, "||") == 0) {
      out.push_back({Token::Kind::punct, src.substr(i, 2), tok_line, begin, i + 2});
      bump(i + 2);
      continue;
    }
    out.push_back({Token::Kind::punct, std::string(1, c), tok_line, begin, i + 1});
    bump(i + 1);
  }
  return out;
}

bool is_punct(const std::vector<Token>& t, std::size_t i, std::string_view p) {
  return i < t.size() && t[i].kind == Token::Kind::punct && t[i].text == p;
}
bool is_ident(const std::vector<Token>& t, std::size_t i, std::string_view name) {
  return i < t.size() && t[i].kind == Token::Kind::ident && t[i].text == name;
}

// Index of the token closing the bracket opened at `open`, or t.size().
std::size_t match_close(const std::vector<Token>& t, std::size_t open) {
  const std::string o = t[open].text;
  const std::string c = o == "(" ? ")" : o == "[" ? "]" : o == "{" ? "}" : ">";
  int depth = 0;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (t[i].kind != Token::Kind::punct) continue;
    if (t[i].text == o) ++depth;
    if (t[i].text == c && --depth == 0) return i;
    if (o == "<" && (t[i].text == ";" || t[i].text == "{")) break;
  }
  return t.size();
}

// Splits (open, close) exclusive into top-level comma separated ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_args(const std::vector<Token>& t, std::size_t open,
                                                            std::size_t close) {
  std::vector<std::pair<std::size_t, std::size_t>> args;
  int depth = 0;
  std::size_t start = open + 1;
  for (std::size_t i = open + 1; i < close; ++i) {
    if (t[i].kind != Token::Kind::punct) continue;
    const std::string& p = t[i].text;
    if (p == "(" || p == "[" || p == "{") ++depth;
    if (p == ")" || p == "]" || p == "}") --depth;
    if (p == "," && depth == 0) {
      args.emplace_back(start, i);
      start = i + 1;
    }
  }
  if (start < close) args.emplace_back(start, close);
  return args;
}

std::string cpp_type_to_ros(const std::vector<Token>& t, std::size_t b, std::size_t e, const MsgIndex& msgs,
                            bool service) {
  std::vector<std::string> parts;
  for (std::size_t i = b; i < e; ++i) {
    if (t[i].kind == Token::Kind::ident) {
      if (t[i].text == "const" || t[i].text == "typename") continue;
      parts.push_back(t[i].text);
    } else if (t[i].text == "::") {
      continue;
    } else if (t[i].text == "&" || t[i].text == "*") {
      continue;
    } else {
      return {};
    }
  }
  while (!parts.empty()) {
    const std::string& last = parts.back();
    if (last == "ConstPtr" || last == "Ptr" || last == "Request" || last == "Response") {
      parts.pop_back();
    } else {
      break;
    }
  }
  if (parts.size() == 2) {
    std::string name = parts[1];
    if (service) {
      for (const char* suffix : {"Request", "Response"}) {
        std::string_view sv(suffix);
        if (name.size() > sv.size() && name.ends_with(sv)) name.resize(name.size() - sv.size());
      }
    }
    return parts[0] + "/" + name;
  }
  if (parts.size() == 1 && !service) {
    if (auto full = lookup_short_name(msgs, parts[0])) return *full;
  }
  return {};
}

struct Frame {
  bool branch = false;
  bool single_statement = false;
  int brace_depth = 0;
  std::string cond;
};

struct HandleInfo {
  std::optional<std::string> ns;  // nullopt when not statically known
};

class CppExtractor {
 public:
  CppExtractor(const MsgIndex& msgs, std::vector<std::pair<const SourceFile*, std::vector<Token>>> files)
      : msgs_(msgs), files_(std::move(files)) {}

  void run(NodeExtraction& out) {
    for (const auto& [file, toks] : files_) collect_handles(toks);
    for (const auto& [file, toks] : files_) scan(*file, toks, out);
  }

 private:
  void collect_handles(const std::vector<Token>& t) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      if (!is_ident(t, i, "NodeHandle")) continue;
      std::size_t j = i + 1;
      bool reference = false;
      while (j < t.size() && (is_punct(t, j, "&") || is_punct(t, j, "*") || is_ident(t, j, "const"))) {
        reference = true;
        ++j;
      }
      if (j >= t.size() || t[j].kind != Token::Kind::ident) continue;
      const std::string var = t[j].text;
      HandleInfo info;
      if (reference) {
        info.ns = std::nullopt;
      } else if (is_punct(t, j + 1, ";") || is_punct(t, j + 1, ",") || is_punct(t, j + 1, ")")) {
        info.ns = std::string();
        if (handles_.contains(var)) continue;  // keep an earlier, more specific declaration
      } else if (is_punct(t, j + 1, "(") || is_punct(t, j + 1, "{")) {
        info.ns = ctor_namespace(t, j + 1);
      } else if (is_punct(t, j + 1, "=")) {
        std::size_t k = j + 2;
        while (k < t.size() && (t[k].kind == Token::Kind::ident || is_punct(t, k, "::"))) ++k;
        info.ns = (k < t.size() && is_punct(t, k, "(")) ? ctor_namespace(t, k) : std::nullopt;
      }
      handles_[var] = info;
    }
    // member initialisers: ": pnh_("~")" or ", pnh_("~")"
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i].kind != Token::Kind::ident || !handles_.contains(t[i].text)) continue;
      if (!(is_punct(t, i - 1, ":") || is_punct(t, i - 1, ","))) continue;
      if (!is_punct(t, i + 1, "(") && !is_punct(t, i + 1, "{")) continue;
      handles_[t[i].text].ns = ctor_namespace(t, i + 1);
    }
  }

  std::optional<std::string> ctor_namespace(const std::vector<Token>& t, std::size_t open) {
    std::size_t close = match_close(t, open);
    if (close == open + 1) return std::string();
    if (close == open + 2 && t[open + 1].kind == Token::Kind::string) return t[open + 1].text;
    return std::nullopt;
  }

  std::optional<HandleInfo> receiver_handle(const std::vector<Token>& t, std::size_t method) {
    if (method < 2) return std::nullopt;
    if (!is_punct(t, method - 1, ".") && !is_punct(t, method - 1, "->")) return std::nullopt;
    const Token& recv = t[method - 2];
    if (recv.kind != Token::Kind::ident) return HandleInfo{std::string()};
    if (auto it = handles_.find(recv.text); it != handles_.end()) return it->second;
    return HandleInfo{std::string()};
  }

  static Unknowable<std::string> apply_handle(const Unknowable<std::string>& name, const HandleInfo& handle,
                                              const std::string& recv) {
    if (!name.known()) return name;
    const std::string& n = name.value();
    if (n.empty() || n[0] == '/' || n[0] == '~') return name;
    if (!handle.ns) return Unknowable<std::string>::unknown("<" + recv + ">/" + n);
    const std::string& ns = *handle.ns;
    if (ns.empty()) return name;
    if (ns == "~") return "~" + n;
    return ns + "/" + n;
  }

  Unknowable<std::string> literal_arg(const std::vector<Token>& t, std::pair<std::size_t, std::size_t> a) {
    if (a.second == a.first + 1 && t[a.first].kind == Token::Kind::string) return t[a.first].text;
    return Unknowable<std::string>::unknown(raw_text(t, a.first, a.second));
  }

  Unknowable<std::int64_t> int_arg(const std::vector<Token>& t, std::pair<std::size_t, std::size_t> a) {
    if (a.second == a.first + 1 && t[a.first].kind == Token::Kind::number) {
      if (auto v = parse_int(t[a.first].text)) return *v;
    }
    return Unknowable<std::int64_t>::unknown(raw_text(t, a.first, a.second));
  }

  std::string raw_text(const std::vector<Token>& t, std::size_t b, std::size_t e) const {
    if (b >= e) return {};
    return collapse_ws(std::string_view(*current_text_).substr(t[b].begin, t[e - 1].end - t[b].begin));
  }

  // Resolves the message type a callback expects by looking up a function
  // with that name and inspecting its parameter list.
  std::optional<std::string> callback_type(const std::vector<Token>& t, std::pair<std::size_t, std::size_t> a,
                                           bool service) {
    // lambda: [..](const T::ConstPtr& m) {...}
    if (is_punct(t, a.first, "[")) {
      std::size_t close = match_close(t, a.first);
      if (is_punct(t, close + 1, "(")) return param_type(t, close + 1, service);
    }
    std::string name;
    for (std::size_t i = a.first; i < a.second; ++i) {
      if (t[i].kind == Token::Kind::ident && t[i].text != "this" && t[i].text != "boost" &&
          t[i].text != "bind" && t[i].text != "std") {
        name = t[i].text;
        if (is_punct(t, i - 1, "::") || is_punct(t, i + 1, ",") || i + 1 == a.second) {
          if (!is_punct(t, i + 1, "::")) break;
        }
      }
    }
    if (name.empty()) return std::nullopt;
    for (const auto& [file, toks] : files_) {
      for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (!is_ident(toks, i, name) || !is_punct(toks, i + 1, "(")) continue;
        if (auto type = param_type(toks, i + 1, service)) return type;
      }
    }
    return std::nullopt;
  }

  std::optional<std::string> param_type(const std::vector<Token>& t, std::size_t open, bool service) {
    std::size_t close = match_close(t, open);
    auto params = split_args(t, open, close);
    if (params.empty()) return std::nullopt;
    auto [b, e] = params[0];
    // drop the parameter name
    if (e > b + 1 && t[e - 1].kind == Token::Kind::ident) --e;
    std::string type = cpp_type_to_ros(t, b, e, msgs_, service);
    if (type.empty() || type.starts_with("std/") || type.starts_with("boost/")) return std::nullopt;
    return type;
  }

  Unknowable<std::string> template_type(const std::vector<Token>& t, std::size_t& i, bool service) {
    if (!is_punct(t, i + 1, "<")) return Unknowable<std::string>::unknown();
    std::size_t close = match_close(t, i + 1);
    if (close >= t.size()) return Unknowable<std::string>::unknown();
    std::string type = cpp_type_to_ros(t, i + 2, close, msgs_, service);
    std::string raw = raw_text(t, i + 2, close);
    i = close;
    if (type.empty()) return Unknowable<std::string>::unknown(raw);
    return type;
  }

  void scan(const SourceFile& file, const std::vector<Token>& t, NodeExtraction& out) {
    std::string text;
    {
      std::ifstream in(file.path, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    current_text_ = &text;

    std::vector<Frame> frames;
    int depth = 0;
    int paren = 0;
    std::optional<std::string> pending;  // condition of an if/else awaiting its body
    std::string last_cond;

    auto close_single = [&] {
      while (!frames.empty() && frames.back().single_statement && frames.back().brace_depth == depth) {
        last_cond = frames.back().cond;
        frames.pop_back();
      }
    };
    auto open_body = [&](std::size_t next) {
      if (!pending) return;
      Frame f;
      f.branch = true;
      f.cond = *pending;
      f.brace_depth = depth;
      f.single_statement = !is_punct(t, next, "{");
      pending.reset();
      if (f.single_statement) {
        frames.push_back(std::move(f));
      } else {
        pending_brace_ = std::move(f);
      }
    };

    for (std::size_t i = 0; i < t.size(); ++i) {
      const Token& tok = t[i];
      if (tok.kind == Token::Kind::ident && (tok.text == "if" || tok.text == "switch") &&
          is_punct(t, i + 1, "(")) {
        std::size_t close = match_close(t, i + 1);
        std::string cond;
        if (close < t.size() && t[i + 1].line == t[close].line) {
          cond = raw_text(t, i + 2, close);
          if (tok.text == "switch") cond = "switch (" + cond + ")";
        }
        pending = cond;
        i = close;
        open_body(i + 1);
        continue;
      }
      if (is_ident(t, i, "else")) {
        if (is_ident(t, i + 1, "if")) continue;
        pending = last_cond.empty() ? std::string() : "!(" + last_cond + ")";
        open_body(i + 1);
        continue;
      }
      if (tok.kind == Token::Kind::punct) {
        if (tok.text == "(") ++paren;
        if (tok.text == ")") --paren;
        if (tok.text == "{") {
          ++depth;
          if (pending_brace_) {
            pending_brace_->brace_depth = depth;
            frames.push_back(std::move(*pending_brace_));
            pending_brace_.reset();
          } else {
            frames.push_back(Frame{false, false, depth, {}});
          }
        } else if (tok.text == "}") {
          while (!frames.empty() && frames.back().brace_depth > depth) frames.pop_back();
          if (!frames.empty() && !frames.back().single_statement && frames.back().brace_depth == depth) {
            if (frames.back().branch) last_cond = frames.back().cond;
            frames.pop_back();
          }
          --depth;
          close_single();
        } else if (tok.text == ";" && paren == 0) {
          close_single();
        }
        continue;
      }
      if (tok.kind != Token::Kind::ident) continue;
      recognise_call(file, t, i, frames, out);
    }
    current_text_ = nullptr;
  }

  void recognise_call(const SourceFile& file, const std::vector<Token>& t, std::size_t& i,
                      const std::vector<Frame>& frames, NodeExtraction& out) {
    const std::string& m = t[i].text;
    static const char* kMethods[] = {"advertise", "subscribe", "advertiseService", "serviceClient",
                                     "param", "getParam", "getParamCached", "setParam", "get", "set"};
    if (std::find_if(std::begin(kMethods), std::end(kMethods), [&](const char* s) { return m == s; }) ==
        std::end(kMethods)) {
      return;
    }
    // ros::param::get / set / param use the global handle
    const bool free_param = i >= 4 && is_punct(t, i - 1, "::") && is_ident(t, i - 2, "param") &&
                            is_punct(t, i - 3, "::") && is_ident(t, i - 4, "ros");
    std::optional<HandleInfo> handle;
    std::string recv;
    if (free_param) {
      handle = HandleInfo{std::string()};
    } else {
      if (m == "get" || m == "set") return;
      handle = receiver_handle(t, i);
      if (!handle) return;
      recv = t[i - 2].text;
    }

    std::size_t j = i;
    const bool service = m == "advertiseService" || m == "serviceClient";
    Unknowable<std::string> ttype = Unknowable<std::string>::unknown();
    if (is_punct(t, j + 1, "<")) ttype = template_type(t, j, service);
    if (!is_punct(t, j + 1, "(")) return;
    std::size_t close = match_close(t, j + 1);
    if (close >= t.size()) return;
    auto args = split_args(t, j + 1, close);
    if (args.empty()) return;

    ExtractedCall call;
    call.loc = SourceLoc{file.display, t[i].line};
    call.name = apply_handle(literal_arg(t, args[0]), *handle, recv);
    for (const auto& f : frames) {
      if (!f.branch) continue;
      call.conditional = true;
      if (!f.cond.empty()) {
        if (!call.condition_text.empty()) call.condition_text += " && ";
        call.condition_text += f.cond;
      }
    }
    if (m == "advertise") {
      call.kind = CallKind::advertise;
      call.type = ttype;
      if (args.size() > 1) call.queue_size = int_arg(t, args[1]);
    } else if (m == "subscribe") {
      call.kind = CallKind::subscribe;
      call.type = ttype;
      if (args.size() > 1) call.queue_size = int_arg(t, args[1]);
      if (!call.type.known() && args.size() > 2) {
        if (auto type = callback_type(t, args[2], false)) call.type = *type;
      }
    } else if (m == "advertiseService") {
      call.kind = CallKind::service_server;
      call.type = ttype;
      if (!call.type.known() && args.size() > 1) {
        if (auto type = callback_type(t, args[1], true)) call.type = *type;
      }
    } else if (m == "serviceClient") {
      call.kind = CallKind::service_client;
      call.type = ttype;
    } else {
      call.kind = (m == "setParam" || m == "set") ? CallKind::param_write : CallKind::param_read;
      call.type = std::string();
    }
    if (handle->ns && handle->ns->starts_with("~")) uses_private_ = *handle->ns;
    out.calls.push_back(std::move(call));
    i = close;
  }

 public:
  std::optional<std::string> uses_private_;

 private:
  const MsgIndex& msgs_;
  std::vector<std::pair<const SourceFile*, std::vector<Token>>> files_;
  std::map<std::string, HandleInfo> handles_;
  std::optional<Frame> pending_brace_;
  const std::string* current_text_ = nullptr;
};

// ------------------------------------------------------------- Python lexing

struct PyLine {
  int line;
  int indent;
  std::string text;  // logical line, comments stripped, continuation joined
};

std::vector<PyLine> python_logical_lines(const std::string& src) {
  std::vector<PyLine> out;
  std::istringstream in(src);
  std::string raw;
  int line_no = 0;
  int depth = 0;
  PyLine current{0, 0, {}};
  bool continuing = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string stripped;
    char quote = 0;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      char c = raw[k];
      if (quote != 0) {
        stripped += c;
        if (c == '\\' && k + 1 < raw.size()) {
          stripped += raw[++k];
        } else if (c == quote) {
          quote = 0;
        }
        continue;
      }
      if (c == '#') break;
      if (c == '"' || c == '\'') quote = c;
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
      stripped += c;
    }
    bool backslash = !stripped.empty() && stripped.back() == '\\';
    if (backslash) stripped.pop_back();
    if (!continuing) {
      if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
      int indent = 0;
      for (char c : stripped) {
        if (c == ' ') {
          ++indent;
        } else if (c == '\t') {
          indent += 8 - indent % 8;
        } else {
          break;
        }
      }
      current = PyLine{line_no, indent, stripped};
    } else {
      current.text += " " + stripped;
    }
    continuing = depth > 0 || backslash;
    if (!continuing) out.push_back(current);
  }
  if (continuing) out.push_back(current);
  return out;
}

std::vector<Token> lex_py(const std::string& text, int line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (c == '"' || c == '\'') {
      std::string s;
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != c) {
        if (text[j] == '\\' && j + 1 < text.size()) ++j;
        s += text[j++];
      }
      out.push_back({Token::Kind::string, s, line, begin, j + 1});
      i = j + 1;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      // string prefixes such as f"..." make the literal dynamic
      if (j < text.size() && (text[j] == '"' || text[j] == '\'') && j - i <= 2) {
        out.push_back({Token::Kind::ident, text.substr(i, j - i), line, begin, j});
        i = j;
        std::size_t k = i + 1;
        while (k < text.size() && text[k] != text[i]) ++k;
        out.push_back({Token::Kind::punct, "?", line, i, k + 1});
        i = k + 1;
        continue;
      }
      out.push_back({Token::Kind::ident, text.substr(i, j - i), line, begin, j});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && (is_ident_char(text[j]) || text[j] == '.')) ++j;
      out.push_back({Token::Kind::number, text.substr(i, j - i), line, begin, j});
      i = j;
      continue;
    }
    out.push_back({Token::Kind::punct, std::string(1, c), line, begin, i + 1});
    ++i;
  }
  return out;
}

struct PyBlock {
  int indent;
  bool branch;
  std::string cond;
};

class PyExtractor {
 public:
  explicit PyExtractor(const MsgIndex& msgs) : msgs_(msgs) {}

  void scan(const SourceFile& file, const std::string& src, NodeExtraction& out) {
    auto lines = python_logical_lines(src);
    for (const auto& l : lines) collect_imports(l.text);

    std::vector<PyBlock> blocks;
    std::string last_cond;
    for (const auto& l : lines) {
      while (!blocks.empty() && blocks.back().indent >= l.indent) {
        if (blocks.back().branch) last_cond = blocks.back().cond;
        blocks.pop_back();
      }
      std::string body = collapse_ws(l.text);
      auto toks = lex_py(body, l.line);
      find_calls(file, body, toks, blocks, out);

      if (body.empty() || body.back() != ':') continue;
      auto first_word = body.substr(0, body.find_first_of(" :("));
      if (first_word == "if" && std::regex_match(body, kMainGuard)) {
        blocks.push_back({l.indent, false, {}});
      } else if (first_word == "if" || first_word == "elif") {
        std::string cond = collapse_ws(body.substr(first_word.size(), body.size() - first_word.size() - 1));
        blocks.push_back({l.indent, true, cond});
      } else if (first_word == "else") {
        blocks.push_back({l.indent, true, last_cond.empty() ? "" : "not (" + last_cond + ")"});
      } else {
        blocks.push_back({l.indent, false, {}});
      }
    }
  }

 private:
  void collect_imports(const std::string& line) {
    auto toks = lex_py(collapse_ws(line), 0);
    if (toks.size() >= 4 && is_ident(toks, 0, "from")) {
      // from pkg.msg import A, B as C
      std::string module;
      std::size_t i = 1;
      while (i < toks.size() && !is_ident(toks, i, "import")) module += toks[i++].text;
      auto dot = module.find('.');
      if (dot == std::string::npos) return;
      std::string pkg = module.substr(0, dot);
      std::string kind = module.substr(dot + 1);
      if (kind != "msg" && kind != "srv") return;
      for (++i; i < toks.size(); ++i) {
        if (toks[i].kind != Token::Kind::ident) continue;
        std::string name = toks[i].text;
        std::string alias = name;
        if (is_ident(toks, i + 1, "as") && i + 2 < toks.size()) {
          alias = toks[i + 2].text;
          i += 2;
        }
        names_[alias] = pkg + "/" + name;
      }
    } else if (toks.size() >= 2 && is_ident(toks, 0, "import")) {
      // import pkg.msg [as m]
      std::string module;
      std::size_t i = 1;
      while (i < toks.size() && !is_ident(toks, i, "as")) module += toks[i++].text;
      auto dot = module.find('.');
      if (dot == std::string::npos) return;
      std::string kind = module.substr(dot + 1);
      if (kind != "msg" && kind != "srv") return;
      if (is_ident(toks, i, "as") && i + 1 < toks.size()) modules_[toks[i + 1].text] = module.substr(0, dot);
    }
  }

  Unknowable<std::string> type_expr(const std::vector<Token>& t, std::size_t b, std::size_t e,
                                    const std::string& raw) {
    std::vector<std::string> parts;
    for (std::size_t i = b; i < e; ++i) {
      if (t[i].kind == Token::Kind::ident) {
        parts.push_back(t[i].text);
      } else if (t[i].text != ".") {
        return Unknowable<std::string>::unknown(raw);
      }
    }
    if (parts.size() == 1) {
      if (auto it = names_.find(parts[0]); it != names_.end()) return it->second;
      if (auto full = lookup_short_name(msgs_, parts[0])) return *full;
    } else if (parts.size() == 3 && (parts[1] == "msg" || parts[1] == "srv")) {
      return parts[0] + "/" + parts[2];
    } else if (parts.size() == 2 && modules_.contains(parts[0])) {
      return modules_.at(parts[0]) + "/" + parts[1];
    }
    return Unknowable<std::string>::unknown(raw);
  }

  void find_calls(const SourceFile& file, const std::string& body, const std::vector<Token>& t,
                  const std::vector<PyBlock>& blocks, NodeExtraction& out) {
    static const char* kCalls[] = {"Publisher", "Subscriber", "Service", "ServiceProxy", "get_param",
                                   "set_param"};
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].kind != Token::Kind::ident || !is_punct(t, i + 1, "(")) continue;
      const std::string& fn = t[i].text;
      if (std::find_if(std::begin(kCalls), std::end(kCalls), [&](const char* s) { return fn == s; }) ==
          std::end(kCalls)) {
        continue;
      }
      if (is_punct(t, i - 1 < t.size() ? i - 1 : t.size(), ".") && !(i >= 2 && is_ident(t, i - 2, "rospy"))) {
        continue;
      }
      std::size_t close = match_close(t, i + 1);
      if (close >= t.size()) continue;
      auto args = split_args(t, i + 1, close);

      std::vector<std::pair<std::size_t, std::size_t>> positional;
      std::map<std::string, std::pair<std::size_t, std::size_t>> keyword;
      for (auto a : args) {
        if (a.second > a.first + 1 && t[a.first].kind == Token::Kind::ident && is_punct(t, a.first + 1, "=") &&
            !is_punct(t, a.first + 2, "=")) {
          keyword[t[a.first].text] = {a.first + 2, a.second};
        } else {
          positional.push_back(a);
        }
      }
      auto arg = [&](std::size_t pos, const char* kw) -> std::optional<std::pair<std::size_t, std::size_t>> {
        if (auto it = keyword.find(kw); it != keyword.end()) return it->second;
        if (pos < positional.size()) return positional[pos];
        return std::nullopt;
      };
      auto raw = [&](std::pair<std::size_t, std::size_t> a) {
        return collapse_ws(std::string_view(body).substr(t[a.first].begin, t[a.second - 1].end - t[a.first].begin));
      };

      ExtractedCall call;
      call.loc = SourceLoc{file.display, t[i].line};
      if (auto a = arg(0, "name")) {
        call.name = (a->second == a->first + 1 && t[a->first].kind == Token::Kind::string)
                        ? Unknowable<std::string>(t[a->first].text)
                        : Unknowable<std::string>::unknown(raw(*a));
      } else {
        continue;
      }
      for (const auto& blk : blocks) {
        if (!blk.branch) continue;
        call.conditional = true;
        if (!blk.cond.empty()) {
          if (!call.condition_text.empty()) call.condition_text += " and ";
          call.condition_text += blk.cond;
        }
      }
      auto typed = [&](const char* kw) {
        if (auto a = arg(1, kw)) return type_expr(t, a->first, a->second, raw(*a));
        return Unknowable<std::string>::unknown();
      };
      auto queue = [&]() -> std::optional<Unknowable<std::int64_t>> {
        auto it = keyword.find("queue_size");
        if (it == keyword.end()) return std::nullopt;
        auto a = it->second;
        if (a.second == a.first + 1 && t[a.first].kind == Token::Kind::number) {
          if (auto v = parse_int(t[a.first].text)) return Unknowable<std::int64_t>(*v);
        }
        return Unknowable<std::int64_t>::unknown(raw(a));
      };
      if (fn == "Publisher") {
        call.kind = CallKind::advertise;
        call.type = typed("data_class");
        call.queue_size = queue();
      } else if (fn == "Subscriber") {
        call.kind = CallKind::subscribe;
        call.type = typed("data_class");
        call.queue_size = queue();
      } else if (fn == "Service") {
        call.kind = CallKind::service_server;
        call.type = typed("service_class");
      } else if (fn == "ServiceProxy") {
        call.kind = CallKind::service_client;
        call.type = typed("service_class");
      } else {
        call.kind = fn == "set_param" ? CallKind::param_write : CallKind::param_read;
        call.type = std::string();
      }
      out.calls.push_back(std::move(call));
    }
  }

  const MsgIndex& msgs_;
  std::map<std::string, std::string> names_;    // imported class -> pkg/Type
  std::map<std::string, std::string> modules_;  // module alias -> pkg
};

std::string read_source(const SourceFile& file) {
  std::ifstream in(file.path, std::ios::binary);
  if (!in) throw Error("cannot read " + file.display);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CallKind kind_for(HintKind k) {
  switch (k) {
    case HintKind::publishers: return CallKind::advertise;
    case HintKind::subscribers: return CallKind::subscribe;
    case HintKind::servers: return CallKind::service_server;
    case HintKind::clients: return CallKind::service_client;
    case HintKind::parameters: return CallKind::param_read;
  }
  return CallKind::advertise;
}

}  // namespace

NodeExtraction extract_node(const NodeTarget& target, const MsgIndex& msgs, IssueList& issues) {
  NodeExtraction out;
  out.target = target;

  std::vector<std::pair<const SourceFile*, std::vector<Token>>> cpp_files;
  PyExtractor py(msgs);
  for (const auto& src : target.sources) {
    std::string text;
    try {
      text = read_source(src);
    } catch (const Error& e) {
      issues.push_back(make_issue(Severity::warning, Category::model, "unreadable-source",
                                  FileScope{{src.display, 0}}, e.what()));
      continue;
    }
    if (src.dialect == Dialect::cpp) {
      cpp_files.emplace_back(&src, lex_cpp(text));
    } else {
      py.scan(src, text, out);
    }
  }
  if (!cpp_files.empty()) {
    CppExtractor cpp(msgs, std::move(cpp_files));
    cpp.run(out);
    out.uses_private_handle_ns = cpp.uses_private_;
  }
  std::stable_sort(out.calls.begin(), out.calls.end(), [](const ExtractedCall& a, const ExtractedCall& b) {
    return a.loc < b.loc;
  });
  return out;
}

NodeExtraction fuse_hints(NodeExtraction extraction, const HintSet& hints, const std::string& node_name,
                          IssueList& issues) {
  auto it = hints.nodes.find(node_name);
  if (it == hints.nodes.end()) return extraction;
  const std::string ns = parent_namespace(node_name);
  auto resolved = [&](const std::string& name) -> std::optional<std::string> {
    try {
      return resolve_name(name, ns, node_name, {});
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  for (HintKind hk : {HintKind::publishers, HintKind::subscribers, HintKind::servers, HintKind::clients,
                      HintKind::parameters}) {
    const CallKind kind = kind_for(hk);
    for (const auto& hint : it->second.of(hk)) {
      const auto hint_name = resolved(hint.name);
      ExtractedCall* match = nullptr;
      bool by_name = false;
      for (auto& call : extraction.calls) {
        if (call.kind == kind && call.name.known() && resolved(call.name.value()) == hint_name) {
          match = &call;
          by_name = true;
          break;
        }
      }
      if (match == nullptr && !hint.type.empty()) {
        for (auto& call : extraction.calls) {
          if (call.kind == kind && !call.name.known() && call.type.known() && call.type.value() == hint.type) {
            match = &call;
            break;
          }
        }
      }
      if (match == nullptr) {
        for (auto& call : extraction.calls) {
          if (call.kind == kind && !call.name.known() && !call.type.known()) {
            match = &call;
            break;
          }
        }
      }

      if (match == nullptr) {
        ExtractedCall call;
        call.kind = kind;
        call.name = hint.name;
        call.type = kind == CallKind::param_read ? Unknowable<std::string>(hint.type)
                    : hint.type.empty()          ? Unknowable<std::string>::unknown()
                                                 : Unknowable<std::string>(hint.type);
        if (hint.queue_size) call.queue_size = Unknowable<std::int64_t>(*hint.queue_size);
        call.provenance = Provenance::hint;
        extraction.calls.push_back(std::move(call));
        continue;
      }

      bool filled = false;
      if (!by_name) {
        match->name = hint.name;
        filled = true;
      }
      if (!hint.type.empty()) {
        if (!match->type.known() || match->type.value().empty()) {
          match->type = hint.type;
          filled = true;
        } else if (match->type.value() != hint.type) {
          issues.push_back(make_issue(Severity::warning, Category::model, "hint-conflict", EntityScope{node_name},
                                      "hint conflict on " + hint.name + ": extracted type " +
                                          match->type.value() + ", hint type " + hint.type));
          match->type = hint.type;
          filled = true;
        }
      }
      if (hint.queue_size && (!match->queue_size || !match->queue_size->known())) {
        match->queue_size = Unknowable<std::int64_t>(*hint.queue_size);
        filled = true;
      }
      if (filled) match->provenance = Provenance::hint;
    }
  }
  return extraction;
}

}  // namespace rosa
