#include "rosa/project.hpp"

#include <yaml-cpp/emitter.h>
#include <yaml-cpp/emittermanip.h>

#include <charconv>
#include <set>

#include "rosa/detail/yaml_doc.hpp"

namespace rosa {

using detail::YamlNode;

const char* to_string(HintKind kind) {
  switch (kind) {
    case HintKind::publishers: return "publishers";
    case HintKind::subscribers: return "subscribers";
    case HintKind::servers: return "servers";
    case HintKind::clients: return "clients";
    case HintKind::parameters: return "parameters";
  }
  return "publishers";
}

const std::vector<ChannelHint>& NodeHints::of(HintKind kind) const {
  return const_cast<NodeHints*>(this)->of(kind);
}

std::vector<ChannelHint>& NodeHints::of(HintKind kind) {
  switch (kind) {
    case HintKind::publishers: return publishers;
    case HintKind::subscribers: return subscribers;
    case HintKind::servers: return servers;
    case HintKind::clients: return clients;
    case HintKind::parameters: return parameters;
  }
  return publishers;
}

std::pair<std::string, std::string> split_package_path(const std::string& path) {
  auto slash = path.find('/');
  if (slash == std::string::npos) return {path, ""};
  return {path.substr(0, slash), path.substr(slash + 1)};
}

namespace {

constexpr HintKind kHintKinds[] = {HintKind::publishers, HintKind::subscribers,
                                   HintKind::servers, HintKind::clients,
                                   HintKind::parameters};

class Loader {
 public:
  Loader(std::string file, IssueList* warnings) : file_(std::move(file)), warnings_(warnings) {}

  ProjectSpec load(const YamlNode& root) {
    if (root.is_null()) throw ValidationError(file_ + ": missing required key 'project'");
    expect_mapping(root, "project file");
    ProjectSpec proj;
    for (const auto& [key, value] : root.entries) {
      if (key == "project") {
        proj.project_name = scalar(value, "project");
      } else if (key == "packages") {
        proj.packages = string_list(value, "packages");
      } else if (key == "configurations") {
        if (value.is_null()) continue;
        expect_mapping(value, "configurations");
        for (const auto& [name, config] : value.entries) {
          proj.configurations.emplace(name, load_config(name, config));
        }
      } else {
        warn(value.loc, "unknown top-level key '" + key + "'");
      }
    }
    if (root.find("project") == nullptr) {
      throw ValidationError(file_ + ": missing required key 'project'");
    }
    if (root.find("packages") == nullptr) {
      throw ValidationError(file_ + ": missing required key 'packages'");
    }
    validate(proj);
    return proj;
  }

 private:
  ConfigSpec load_config(const std::string& name, const YamlNode& node) {
    expect_mapping(node, "configuration '" + name + "'");
    ConfigSpec config;
    for (const auto& [key, value] : node.entries) {
      if (key == "launch") {
        config.launch_files = string_list(value, "launch");
      } else if (key == "hints") {
        config.hints = load_hints(value);
      } else {
        warn(value.loc, "unknown key '" + key + "' in configuration '" + name + "'");
      }
    }
    if (config.launch_files.empty()) {
      throw ValidationError(file_ + ": configuration '" + name + "' has no launch files");
    }
    return config;
  }

  HintSet load_hints(const YamlNode& node) {
    HintSet hints;
    if (node.is_null()) return hints;
    expect_mapping(node, "hints");
    for (const auto& [key, value] : node.entries) {
      if (key != "nodes") {
        warn(value.loc, "unknown hint key '" + key + "'");
        continue;
      }
      if (value.is_null()) continue;
      expect_mapping(value, "hints.nodes");
      for (const auto& [node_name, node_hints] : value.entries) {
        if (node_name.empty() || node_name[0] != '/') {
          throw ValidationError(to_string(value.loc) + ": hint node name '" + node_name +
                                "' must be a global name");
        }
        hints.nodes.emplace(node_name, load_node_hints(node_hints));
      }
    }
    return hints;
  }

  NodeHints load_node_hints(const YamlNode& node) {
    NodeHints hints;
    if (node.is_null()) return hints;
    expect_mapping(node, "node hints");
    for (const auto& [key, value] : node.entries) {
      bool known = false;
      for (HintKind kind : kHintKinds) {
        if (key != to_string(kind)) continue;
        known = true;
        if (!value.is_sequence()) {
          throw ParseError(value.loc, "'" + key + "' must be a list");
        }
        for (const auto& item : value.items) hints.of(kind).push_back(load_hint(kind, item));
      }
      if (!known) warn(value.loc, "unknown hint kind '" + key + "'");
    }
    return hints;
  }

  ChannelHint load_hint(HintKind kind, const YamlNode& node) {
    expect_mapping(node, "hint");
    ChannelHint hint;
    const bool is_service = kind == HintKind::servers || kind == HintKind::clients;
    const bool is_param = kind == HintKind::parameters;
    const char* name_key = is_service ? "service" : is_param ? "name" : "topic";
    const char* type_key = is_service ? "srv_type" : is_param ? "type" : "msg_type";
    for (const auto& [key, value] : node.entries) {
      if (key == name_key) {
        hint.name = scalar(value, key);
      } else if (key == type_key) {
        hint.type = scalar(value, key);
      } else if (key == "queue_size") {
        std::string text = scalar(value, key);
        std::int64_t q = -1;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), q);
        if (ec != std::errc{} || ptr != text.data() + text.size() || q < 0) {
          throw ValidationError(to_string(value.loc) + ": queue_size must be a non-negative integer");
        }
        hint.queue_size = q;
      } else {
        warn(value.loc, "unknown hint field '" + key + "'");
      }
    }
    if (hint.name.empty()) {
      throw ValidationError(to_string(node.loc) + ": hint is missing '" + name_key + "'");
    }
    return hint;
  }

  void validate(const ProjectSpec& proj) const {
    if (proj.project_name.empty()) throw ValidationError(file_ + ": project name is empty");
    std::set<std::string> seen;
    for (const auto& pkg : proj.packages) {
      if (pkg.empty() || pkg.find('/') != std::string::npos || pkg.find('\\') != std::string::npos) {
        throw ValidationError(file_ + ": invalid package name '" + pkg + "'");
      }
      if (!seen.insert(pkg).second) {
        throw ValidationError(file_ + ": duplicate package '" + pkg + "'");
      }
    }
    for (const auto& [name, config] : proj.configurations) {
      for (const auto& launch : config.launch_files) {
        auto [pkg, rel] = split_package_path(launch);
        if (rel.empty() || !seen.contains(pkg)) {
          throw ValidationError(file_ + ": launch path '" + launch + "' in configuration '" + name +
                                "' is outside the package whitelist");
        }
      }
    }
  }

  std::string scalar(const YamlNode& node, const std::string& what) const {
    if (!node.is_scalar()) throw ParseError(node.loc, "'" + what + "' must be a scalar");
    return node.scalar;
  }

  std::vector<std::string> string_list(const YamlNode& node, const std::string& what) const {
    if (node.is_null()) return {};
    if (!node.is_sequence()) throw ParseError(node.loc, "'" + what + "' must be a list");
    std::vector<std::string> out;
    for (const auto& item : node.items) out.push_back(scalar(item, what));
    return out;
  }

  void expect_mapping(const YamlNode& node, const std::string& what) const {
    if (!node.is_mapping()) throw ParseError(node.loc, what + " must be a mapping");
  }

  void warn(const SourceLoc& loc, std::string message) {
    if (warnings_ != nullptr) {
      warnings_->push_back(make_issue(Severity::warning, Category::indexing, "project-key",
                                      FileScope{loc}, std::move(message)));
    }
  }

  std::string file_;
  IssueList* warnings_;
};

}  // namespace

ProjectSpec parse_project_text(const std::string& text, const std::string& file_name,
                               IssueList* warnings) {
  return Loader(file_name, warnings).load(detail::parse_yaml(text, file_name));
}

ProjectSpec parse_project_file(const std::filesystem::path& path, IssueList* warnings) {
  const std::string display = path.filename().string();
  return Loader(display, warnings).load(detail::load_yaml_file(path.string(), display));
}

std::string serialize_project(const ProjectSpec& proj) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "project" << YAML::Value << YAML::DoubleQuoted << proj.project_name;
  out << YAML::Key << "packages" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& pkg : proj.packages) out << YAML::DoubleQuoted << pkg;
  out << YAML::EndSeq;
  out << YAML::Key << "configurations" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, config] : proj.configurations) {
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "launch" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& launch : config.launch_files) out << YAML::DoubleQuoted << launch;
    out << YAML::EndSeq;
    if (!config.hints.empty()) {
      out << YAML::Key << "hints" << YAML::Value << YAML::BeginMap;
      out << YAML::Key << "nodes" << YAML::Value << YAML::BeginMap;
      for (const auto& [node, hints] : config.hints.nodes) {
        out << YAML::Key << node << YAML::Value << YAML::BeginMap;
        for (HintKind kind : kHintKinds) {
          const auto& list = hints.of(kind);
          if (list.empty()) continue;
          const bool is_service = kind == HintKind::servers || kind == HintKind::clients;
          const bool is_param = kind == HintKind::parameters;
          out << YAML::Key << to_string(kind) << YAML::Value << YAML::BeginSeq;
          for (const auto& hint : list) {
            out << YAML::BeginMap;
            out << YAML::Key << (is_service ? "service" : is_param ? "name" : "topic")
                << YAML::Value << YAML::DoubleQuoted << hint.name;
            if (!hint.type.empty()) {
              out << YAML::Key << (is_service ? "srv_type" : is_param ? "type" : "msg_type")
                  << YAML::Value << YAML::DoubleQuoted << hint.type;
            }
            if (hint.queue_size) out << YAML::Key << "queue_size" << YAML::Value << *hint.queue_size;
            out << YAML::EndMap;
          }
          out << YAML::EndSeq;
        }
        out << YAML::EndMap;
      }
      out << YAML::EndMap << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace rosa
