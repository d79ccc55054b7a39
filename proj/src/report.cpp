#include "rosa/report.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rosa {

Statistics total_statistics(const std::vector<RosGraph>& graphs) {
  Statistics total;
  for (const auto& g : graphs) {
    Statistics s = graph_statistics(g);
    total.nodes += s.nodes;
    total.topics += s.topics;
    total.services += s.services;
    total.parameters += s.parameters;
    total.links += s.links;
    total.conditional_links += s.conditional_links;
    total.conditional_entities += s.conditional_entities;
    total.unresolved_entities += s.unresolved_entities;
  }
  return total;
}

namespace {

template <typename T>
void put_unknowable(nlohmann::json& j, const std::string& key, const Unknowable<T>& u) {
  j[key] = u.known() ? nlohmann::json(u.value()) : nlohmann::json(nullptr);
  if (!u.known() && !u.text().empty()) j[key + "_expr"] = u.text();
}

nlohmann::json condition_json(const Condition& c) {
  return c.is_always() ? nlohmann::json(nullptr) : nlohmann::json(c.text);
}

nlohmann::json scope_json(const IssueScope& scope) {
  return std::visit(
      [](const auto& s) -> nlohmann::json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, PackageScope>) {
          return {{"kind", "package"}, {"package", s.package}};
        } else if constexpr (std::is_same_v<S, FileScope>) {
          return {{"kind", "file"}, {"file", s.loc.file}, {"line", s.loc.line}};
        } else if constexpr (std::is_same_v<S, ConfigurationScope>) {
          return {{"kind", "configuration"}, {"configuration", s.configuration}};
        } else if constexpr (std::is_same_v<S, EntityScope>) {
          return {{"kind", "entity"}, {"entity", s.entity}};
        } else {
          return {{"kind", "project"}};
        }
      },
      scope);
}

nlohmann::json channel_json(const ChannelResource& c) {
  nlohmann::json j{{"name", c.name}, {"condition", condition_json(c.condition)}, {"unresolved", c.unresolved}};
  put_unknowable(j, "type", c.msg_type);
  return j;
}

std::string escape_html(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string quote_dot(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

}  // namespace

nlohmann::json to_json(const Issue& issue) {
  return {{"id", issue.id},
          {"severity", to_string(issue.severity)},
          {"category", to_string(issue.category)},
          {"rule", issue.rule},
          {"scope", scope_json(issue.scope)},
          {"message", issue.message}};
}

nlohmann::json to_json(const Statistics& s) {
  return {{"nodes", s.nodes},
          {"topics", s.topics},
          {"services", s.services},
          {"parameters", s.parameters},
          {"links", s.links},
          {"conditional_links", s.conditional_links},
          {"conditional_entities", s.conditional_entities},
          {"unresolved_entities", s.unresolved_entities}};
}

nlohmann::json to_json(const RosGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"name", n.name},
                     {"package", n.package},
                     {"type", n.node_type},
                     {"condition", condition_json(n.condition)},
                     {"provenance", n.provenance},
                     {"has_source", n.has_source}});
  }
  nlohmann::json topics = nlohmann::json::array();
  for (const auto& t : g.topics) topics.push_back(channel_json(t));
  nlohmann::json services = nlohmann::json::array();
  for (const auto& s : g.services) services.push_back(channel_json(s));
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : g.parameters) {
    nlohmann::json j{{"name", p.name}, {"condition", condition_json(p.condition)}, {"unresolved", p.unresolved}};
    put_unknowable(j, "value", p.value);
    params.push_back(j);
  }
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : g.links) {
    nlohmann::json j{{"node", l.node},
                     {"resource", l.resource},
                     {"role", to_string(l.role)},
                     {"conditional", l.conditional},
                     {"condition", l.condition_text.empty() ? nlohmann::json(nullptr) : nlohmann::json(l.condition_text)},
                     {"provenance", to_string(l.provenance)},
                     {"file", l.loc ? nlohmann::json(l.loc->file) : nlohmann::json(nullptr)},
                     {"line", l.loc ? nlohmann::json(l.loc->line) : nlohmann::json(nullptr)}};
    put_unknowable(j, "type", l.msg_type);
    if (l.queue_size) {
      put_unknowable(j, "queue_size", *l.queue_size);
    } else {
      j["queue_size"] = nullptr;
    }
    links.push_back(j);
  }
  return {{"configuration", g.configuration},
          {"nodes", nodes},
          {"topics", topics},
          {"services", services},
          {"parameters", params},
          {"links", links}};
}

nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : r.issues) issues.push_back(to_json(i));
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& g : r.graphs) graphs.push_back(to_json(g));
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : r.property_results) {
    props.push_back({{"property", p.property_id},
                     {"text", p.property_text},
                     {"verdict", to_string(p.verdict.value)},
                     {"witness", p.verdict.witness},
                     {"explanation", p.verdict.explanation}});
  }
  return {{"project", r.project},
          {"statistics", to_json(r.statistics)},
          {"sources", {{"packages", r.sources.packages}, {"files", r.sources.files}, {"lines", r.sources.lines}}},
          {"issues", issues},
          {"graphs", graphs},
          {"property_results", props},
          {"campaign_results", r.campaign_results.empty() ? nlohmann::json::array() : nlohmann::json(r.campaign_results)}};
}

std::string canonical_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<std::filesystem::path> export_json(const AnalysisReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  written.push_back(dir / "report.json");
  write_file(written.back(), canonical_text(to_json(r)));
  for (const auto& g : r.graphs) {
    written.push_back(dir / (g.configuration + ".graph.json"));
    write_file(written.back(), canonical_text(to_json(g)));
  }
  return written;
}

std::string export_dot(const RosGraph& g, const IssueList& issues) {
  std::set<std::string> flagged;
  for (const auto& i : issues) {
    if (i.severity != Severity::error) continue;
    if (auto e = std::get_if<EntityScope>(&i.scope)) flagged.insert(e->entity);
  }
  auto attrs = [&](const std::string& name, const char* shape, const std::string& label, bool dashed) {
    std::string a = "[label=" + quote_dot(label) + ", shape=" + shape;
    if (dashed) a += ", style=dashed";
    if (flagged.contains(name)) a += ", color=red, penwidth=2, class=\"highlight\"";
    return a + "]";
  };
  std::ostringstream out;
  out << "digraph " << quote_dot(g.configuration) << " {\n";
  out << "  rankdir=LR;\n";
  for (const auto& n : g.nodes) {
    out << "  " << quote_dot("node:" + n.name) << " "
        << attrs(n.name, "ellipse", n.name, !n.condition.is_always()) << ";\n";
  }
  for (const auto* list : {&g.topics, &g.services}) {
    for (const auto& c : *list) {
      std::string label = c.name + "\n" + (c.msg_type.known() ? c.msg_type.value() : "?");
      out << "  " << quote_dot(std::string(to_string(c.kind)) + ":" + c.name) << " "
          << attrs(c.name, "box", label, !c.condition.is_always()) << ";\n";
    }
  }
  for (const auto& l : g.links) {
    const ResourceKind kind = resource_kind(l.role);
    if (kind == ResourceKind::parameter) continue;
    const std::string node = quote_dot("node:" + l.node);
    const std::string res = quote_dot(std::string(to_string(kind)) + ":" + l.resource);
    const bool outgoing = l.role == LinkRole::publisher || l.role == LinkRole::client;
    out << "  " << (outgoing ? node : res) << " -> " << (outgoing ? res : node);
    if (l.conditional) out << " [style=dashed]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::vector<nlohmann::json> append_history(const AnalysisReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "history.jsonl";
  std::vector<nlohmann::json> history;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      history.push_back(nlohmann::json::parse(line));
    }
  }
  std::map<std::string, std::size_t> by_severity{{"error", 0}, {"warning", 0}, {"info", 0}};
  for (const auto& i : r.issues) ++by_severity[to_string(i.severity)];
  nlohmann::json entry{{"run", history.size() + 1},
                       {"project", r.project},
                       {"statistics", to_json(r.statistics)},
                       {"issues", by_severity}};
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write " + path.string());
  out << entry.dump() << "\n";
  history.push_back(entry);
  return history;
}

namespace {

std::string render_svg(const RosGraph& g) {
  const int row = 36;
  std::map<std::string, std::pair<int, int>> pos;
  int y = 30;
  for (const auto& n : g.nodes) {
    pos["node:" + n.name] = {110, y};
    y += row;
  }
  int height = y;
  y = 30;
  for (const auto* list : {&g.topics, &g.services}) {
    for (const auto& c : *list) {
      pos[std::string(to_string(c.kind)) + ":" + c.name] = {430, y};
      y += row;
    }
  }
  height = std::max(height, y);
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"" << height << "\">";
  for (const auto& l : g.links) {
    const ResourceKind kind = resource_kind(l.role);
    if (kind == ResourceKind::parameter) continue;
    auto a = pos.find("node:" + l.node);
    auto b = pos.find(std::string(to_string(kind)) + ":" + l.resource);
    if (a == pos.end() || b == pos.end()) continue;
    svg << "<line x1=\"" << a->second.first + 90 << "\" y1=\"" << a->second.second << "\" x2=\""
        << b->second.first - 100 << "\" y2=\"" << b->second.second << "\" stroke=\"#555\""
        << (l.conditional ? " stroke-dasharray=\"5,4\"" : "") << "/>";
  }
  for (const auto& n : g.nodes) {
    auto [x, yy] = pos["node:" + n.name];
    svg << "<ellipse cx=\"" << x << "\" cy=\"" << yy << "\" rx=\"90\" ry=\"14\" fill=\"#eef\" stroke=\"#333\""
        << (n.condition.is_always() ? "" : " stroke-dasharray=\"5,4\"") << "/><text x=\"" << x << "\" y=\""
        << yy + 4 << "\" text-anchor=\"middle\" font-size=\"11\">" << escape_html(n.name) << "</text>";
  }
  for (const auto* list : {&g.topics, &g.services}) {
    for (const auto& c : *list) {
      auto [x, yy] = pos[std::string(to_string(c.kind)) + ":" + c.name];
      svg << "<rect x=\"" << x - 100 << "\" y=\"" << yy - 13 << "\" width=\"200\" height=\"26\" fill=\"#efe\" stroke=\"#333\""
          << (c.condition.is_always() ? "" : " stroke-dasharray=\"5,4\"") << "/><text x=\"" << x << "\" y=\"" << yy + 4
          << "\" text-anchor=\"middle\" font-size=\"11\">" << escape_html(c.name) << "</text>";
    }
  }
  svg << "</svg>";
  return svg.str();
}

}  // namespace

std::string render_html(const AnalysisReport& r, const std::vector<nlohmann::json>& history) {
  std::map<std::string, std::size_t> by_severity{{"error", 0}, {"warning", 0}, {"info", 0}};
  std::map<std::string, std::vector<const Issue*>> by_category;
  for (const auto& i : r.issues) {
    ++by_severity[to_string(i.severity)];
    by_category[to_string(i.category)].push_back(&i);
  }
  std::ostringstream h;
  h << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" << escape_html(r.project)
    << "</title>\n<style>body{font-family:sans-serif;margin:2em}section.panel{display:inline-block;vertical-align:top;"
       "border:1px solid #ccc;padding:.5em 1em;margin:.5em}li.issue.error{color:#a00}li.issue.warning{color:#a60}"
       "pre{background:#f6f6f6;padding:1em}</style></head><body>\n";
  h << "<h1>" << escape_html(r.project) << "</h1>\n";

  h << "<section class=\"panel\" id=\"source-statistics\"><h2>Source code</h2><table>"
    << "<tr><td>packages</td><td>" << r.sources.packages << "</td></tr>";
  for (const auto& [dialect, files] : r.sources.files) {
    auto lines = r.sources.lines.find(dialect);
    h << "<tr><td>" << escape_html(dialect) << " files</td><td>" << files << "</td></tr><tr><td>" << escape_html(dialect)
      << " lines</td><td>" << (lines == r.sources.lines.end() ? 0 : lines->second) << "</td></tr>";
  }
  h << "</table></section>\n";

  const auto stats = to_json(r.statistics);
  h << "<section class=\"panel\" id=\"analysis-statistics\"><h2>Analysis</h2><table>";
  for (const auto& [k, v] : stats.items()) h << "<tr><td>" << k << "</td><td>" << v.dump() << "</td></tr>";
  h << "<tr><td>issues</td><td><span id=\"issue-count\">" << r.issues.size() << "</span></td></tr>";
  for (const auto& [sev, n] : by_severity) h << "<tr><td>" << sev << "</td><td>" << n << "</td></tr>";
  h << "</table></section>\n";

  h << "<section class=\"panel\" id=\"history\"><h2>History</h2><table><tr><th>run</th><th>nodes</th><th>links</th>"
       "<th>errors</th><th>warnings</th></tr>";
  for (const auto& e : history) {
    h << "<tr class=\"run\"><td>" << e.value("run", 0) << "</td><td>" << e["statistics"].value("nodes", 0) << "</td><td>"
      << e["statistics"].value("links", 0) << "</td><td>" << e["issues"].value("error", 0) << "</td><td>"
      << e["issues"].value("warning", 0) << "</td></tr>";
  }
  h << "</table></section>\n";

  h << "<h2>Issues</h2>\n";
  for (const auto& [cat, list] : by_category) {
    h << "<section class=\"category\" id=\"category-" << cat << "\"><h3>" << cat << " (" << list.size() << ")</h3><ul>\n";
    for (const Issue* i : list) {
      h << "<li class=\"issue " << to_string(i->severity) << "\"><code>" << escape_html(i->id) << "</code> "
        << escape_html(i->message) << "</li>\n";
    }
    h << "</ul></section>\n";
  }

  if (!r.property_results.empty()) {
    h << "<h2>Properties</h2><table>";
    for (const auto& p : r.property_results) {
      h << "<tr class=\"verdict\"><td>" << escape_html(p.property_id) << "</td><td><code>" << escape_html(p.property_text)
        << "</code></td><td>" << to_string(p.verdict.value) << "</td></tr>";
    }
    h << "</table>\n";
  }

  for (const auto& g : r.graphs) {
    h << "<section class=\"graph\"><h2>Configuration " << escape_html(g.configuration) << "</h2>\n"
      << render_svg(g) << "\n<pre class=\"dot\">" << escape_html(export_dot(g, r.issues)) << "</pre></section>\n";
  }
  h << "</body></html>\n";
  return h.str();
}

std::vector<std::filesystem::path> export_html(const AnalysisReport& r, const std::filesystem::path& dir) {
  auto history = append_history(r, dir);
  std::vector<std::filesystem::path> written{dir / "index.html"};
  write_file(written.back(), render_html(r, history));
  for (const auto& g : r.graphs) {
    written.push_back(dir / (g.configuration + ".dot"));
    write_file(written.back(), export_dot(g, r.issues));
  }
  return written;
}

}  // namespace rosa
