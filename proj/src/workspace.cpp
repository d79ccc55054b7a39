#include "rosa/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rosa/detail/xml_doc.hpp"

namespace fs = std::filesystem;

namespace rosa {

const char* to_string(Dialect d) { return d == Dialect::cpp ? "cpp" : "py"; }

std::string Package::display(const fs::path& p) const {
  fs::path rel = p.lexically_relative(root);
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return (fs::path(display_root) / rel).generic_string();
}

std::optional<Dialect> dialect_for(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".c" || ext == ".cc" || ext == ".cpp" || ext == ".h" || ext == ".hpp") {
    return Dialect::cpp;
  }
  if (ext == ".py") return Dialect::py;
  return std::nullopt;
}

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& text) {
  if (text.empty()) return 0;
  auto n = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  return text.back() == '\n' ? n : n + 1;
}

bool hidden(const fs::path& p) {
  const std::string name = p.filename().string();
  return !name.empty() && name[0] == '.';
}

bool has_python_shebang(const fs::path& p) {
  std::ifstream in(p);
  std::string first;
  std::getline(in, first);
  return first.rfind("#!", 0) == 0 && first.find("python") != std::string::npos;
}

bool is_executable(const fs::path& p) {
  std::error_code ec;
  auto perms = fs::status(p, ec).permissions();
  return !ec && (perms & fs::perms::owner_exec) != fs::perms::none;
}

bool is_script_dir(const fs::path& pkg_root, const fs::path& file) {
  fs::path rel = file.parent_path().lexically_relative(pkg_root);
  return rel == "scripts" || rel == "nodes";
}

std::optional<std::string> manifest_name(const fs::path& manifest) {
  auto doc = detail::parse_xml(read_text(manifest), manifest.string());
  const auto* name = doc.child("name");
  if (name == nullptr) return std::nullopt;
  std::string text = name->text;
  auto b = text.find_first_not_of(" \t\r\n");
  auto e = text.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return std::nullopt;
  return text.substr(b, e - b + 1);
}

void find_manifests(const fs::path& dir, std::vector<fs::path>& out) {
  if (fs::exists(dir / "package.xml")) {
    out.push_back(dir);
    return;
  }
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && !hidden(entry.path())) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& sub : subdirs) find_manifests(sub, out);
}

Package index_package(const fs::path& ws_root, const fs::path& root, const std::string& name,
                      IssueList& issues) {
  Package pkg;
  pkg.name = name;
  pkg.root = root;
  pkg.display_root = root.lexically_relative(ws_root).generic_string();

  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator();
       ++it) {
    if (hidden(it->path())) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file()) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    auto dialect = dialect_for(file);
    if (!dialect && is_script_dir(root, file) && file.extension().empty() &&
        has_python_shebang(file)) {
      dialect = Dialect::py;
    }
    if (dialect) {
      SourceFile src;
      src.path = file;
      src.display = pkg.display(file);
      src.dialect = *dialect;
      try {
        src.line_count = count_lines(read_text(file));
      } catch (const Error& e) {
        issues.push_back(make_issue(Severity::warning, Category::indexing, "unreadable",
                                    PackageScope{name}, e.what()));
        continue;
      }
      pkg.source_files.push_back(std::move(src));
    }
    const std::string fname = file.filename().string();
    if (file.extension() == ".msg") {
      try {
        pkg.msg_defs.push_back(parse_msg_file(file, name));
      } catch (const ParseError& e) {
        issues.push_back(make_issue(Severity::error, Category::indexing, "msg-parse",
                                    FileScope{{pkg.display(file), e.loc().line}}, e.what()));
      }
    } else if (file.extension() == ".launch" ||
               (fname.size() > 11 && fname.ends_with(".launch.xml"))) {
      pkg.launch_files.push_back(file);
    }
  }
  if (fs::exists(root / "CMakeLists.txt")) pkg.build_file = root / "CMakeLists.txt";
  return pkg;
}

// Lexical view of a CMake file: command name plus expanded argument words.
struct CMakeCommand {
  std::string name;
  std::vector<std::string> args;
  int line = 0;
};

std::vector<CMakeCommand> scan_cmake(const std::string& text) {
  std::vector<CMakeCommand> commands;
  std::size_t i = 0;
  int line = 1;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') ++line;
    }
  };
  auto skip_comment = [&] {
    if (text.compare(i, 3, "#[[") == 0) {
      auto end = text.find("]]", i);
      advance(end == std::string::npos ? text.size() - i : end + 2 - i);
    } else {
      while (i < text.size() && text[i] != '\n') advance();
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      skip_comment();
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      CMakeCommand cmd;
      cmd.line = line;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        cmd.name += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        advance();
      }
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) advance();
      if (i >= text.size() || text[i] != '(') continue;
      advance();
      int depth = 1;
      std::string word;
      auto flush = [&] {
        if (!word.empty()) cmd.args.push_back(std::move(word));
        word.clear();
      };
      while (i < text.size() && depth > 0) {
        char d = text[i];
        if (d == '#') {
          flush();
          skip_comment();
        } else if (d == '"') {
          advance();
          while (i < text.size() && text[i] != '"') {
            if (text[i] == '\\' && i + 1 < text.size()) advance();
            word += text[i];
            advance();
          }
          advance();
          cmd.args.push_back(std::move(word));
          word.clear();
        } else if (d == '(') {
          ++depth;
          word += d;
          advance();
        } else if (d == ')') {
          if (--depth > 0) word += d;
          advance();
        } else if (std::isspace(static_cast<unsigned char>(d))) {
          flush();
          advance();
        } else {
          word += d;
          advance();
        }
      }
      flush();
      commands.push_back(std::move(cmd));
      continue;
    }
    advance();
  }
  return commands;
}

// Expands ${PROJECT_NAME}; returns nullopt when another variable remains.
std::optional<std::string> expand_project_name(const std::string& word, const std::string& project) {
  std::string out = word;
  for (std::size_t pos; (pos = out.find("${PROJECT_NAME}")) != std::string::npos;) {
    out.replace(pos, 15, project);
  }
  if (out.find("${") != std::string::npos) return std::nullopt;
  return out;
}

}  // namespace

std::vector<Package> index_workspace(const fs::path& ws_root, const ProjectSpec& proj,
                                     IssueList& issues) {
  if (!fs::is_directory(ws_root)) throw Error("workspace root does not exist: " + ws_root.string());
  const fs::path root = fs::weakly_canonical(ws_root);
  const std::set<std::string> wanted(proj.packages.begin(), proj.packages.end());

  std::vector<fs::path> dirs;
  find_manifests(root, dirs);

  std::map<std::string, Package> found;
  for (const auto& dir : dirs) {
    std::optional<std::string> name;
    try {
      name = manifest_name(dir / "package.xml");
    } catch (const Error& e) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "manifest",
                                  FileScope{{dir.lexically_relative(root).generic_string() +
                                                 "/package.xml",
                                             0}},
                                  e.what()));
      continue;
    }
    if (!name || !wanted.contains(*name)) continue;
    if (found.contains(*name)) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "duplicate-package",
                                  PackageScope{*name},
                                  "package '" + *name + "' found more than once; keeping " +
                                      found.at(*name).display_root));
      continue;
    }
    try {
      found.emplace(*name, index_package(root, dir, *name, issues));
    } catch (const fs::filesystem_error& e) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "unreadable",
                                  PackageScope{*name}, e.what()));
    }
  }

  for (const auto& name : proj.packages) {
    if (!found.contains(name)) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "package-not-found",
                                  PackageScope{name}, "package '" + name + "' not found"));
    }
  }

  std::vector<Package> out;
  for (auto& [name, pkg] : found) out.push_back(std::move(pkg));
  return out;
}

std::vector<NodeTarget> associate_targets(const Package& pkg, IssueList& issues) {
  std::map<std::string, NodeTarget> targets;
  auto add_target = [&](NodeTarget target) {
    std::string name = target.target_name;
    if (!targets.emplace(name, std::move(target)).second) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "duplicate-target",
                                  PackageScope{pkg.name},
                                  "target '" + name + "' declared more than once"));
    }
  };
  auto source_for = [&](const fs::path& p) -> std::optional<SourceFile> {
    for (const auto& src : pkg.source_files) {
      if (src.path == p) return src;
    }
    return std::nullopt;
  };

  if (pkg.build_file) {
    std::string project = pkg.name;
    std::string text;
    try {
      text = read_text(*pkg.build_file);
    } catch (const Error& e) {
      issues.push_back(make_issue(Severity::warning, Category::indexing, "unreadable",
                                  PackageScope{pkg.name}, e.what()));
    }
    for (const auto& cmd : scan_cmake(text)) {
      SourceLoc loc{pkg.display(*pkg.build_file), cmd.line};
      if (cmd.name == "project" && !cmd.args.empty()) {
        project = cmd.args[0];
        continue;
      }
      if (cmd.name != "add_executable" || cmd.args.empty()) continue;
      auto name = expand_project_name(cmd.args[0], project);
      if (!name) {
        issues.push_back(make_issue(Severity::warning, Category::indexing, "build-variable",
                                    FileScope{loc},
                                    "cannot expand target name '" + cmd.args[0] + "'"));
        continue;
      }
      if (cmd.args.size() > 1 && (cmd.args[1] == "IMPORTED" || cmd.args[1] == "ALIAS")) continue;
      NodeTarget target{pkg.name, *name, {}};
      for (std::size_t k = 1; k < cmd.args.size(); ++k) {
        const std::string& word = cmd.args[k];
        if (word == "WIN32" || word == "MACOSX_BUNDLE" || word == "EXCLUDE_FROM_ALL") continue;
        auto expanded = expand_project_name(word, project);
        if (!expanded) {
          issues.push_back(make_issue(Severity::warning, Category::indexing, "build-variable",
                                      FileScope{loc},
                                      "cannot expand source '" + word + "' of target '" + *name + "'"));
          continue;
        }
        fs::path path = (pkg.root / *expanded).lexically_normal();
        auto src = source_for(path);
        if (!src) {
          issues.push_back(make_issue(Severity::warning, Category::indexing, "missing-source",
                                      PackageScope{pkg.name},
                                      "target '" + *name + "' lists missing source '" + *expanded + "'"));
          continue;
        }
        target.sources.push_back(*src);
      }
      add_target(std::move(target));
    }
  } else {
    issues.push_back(make_issue(Severity::info, Category::indexing, "no-build-file",
                                PackageScope{pkg.name},
                                "package '" + pkg.name + "' has no build file"));
  }

  for (const auto& src : pkg.source_files) {
    if (src.dialect != Dialect::py || !is_script_dir(pkg.root, src.path)) continue;
    if (src.path.extension() != ".py" && !is_executable(src.path)) continue;
    add_target(NodeTarget{pkg.name, src.path.filename().string(), {src}});
  }

  std::vector<NodeTarget> out;
  for (auto& [name, target] : targets) out.push_back(std::move(target));
  return out;
}

MsgIndex build_msg_index(const std::vector<Package>& packages) {
  MsgIndex index = builtin_messages();
  for (const auto& pkg : packages) {
    for (const auto& def : pkg.msg_defs) index[def.qualified_name] = def;
  }
  return index;
}

const Package* find_package(const std::vector<Package>& packages, std::string_view name) {
  for (const auto& pkg : packages) {
    if (pkg.name == name) return &pkg;
  }
  return nullptr;
}

}  // namespace rosa
