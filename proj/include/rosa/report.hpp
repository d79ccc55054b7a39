#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "rosa/core.hpp"
#include "rosa/graph.hpp"
#include "rosa/monitor.hpp"

namespace rosa {

struct SourceStatistics {
  std::size_t packages = 0;
  std::map<std::string, std::size_t> files;  // by dialect
  std::map<std::string, std::size_t> lines;

  bool operator==(const SourceStatistics&) const = default;
};

struct AnalysisReport {
  std::string project;
  Statistics statistics;  // summed over graphs
  SourceStatistics sources;
  IssueList issues;
  std::vector<RosGraph> graphs;
  std::vector<PropertyResult> property_results;
  std::vector<nlohmann::json> campaign_results;
};

Statistics total_statistics(const std::vector<RosGraph>& graphs);

nlohmann::json to_json(const Issue& issue);
nlohmann::json to_json(const RosGraph& g);
nlohmann::json to_json(const Statistics& s);
nlohmann::json to_json(const AnalysisReport& r);

/// Two-space indented, keys sorted, trailing newline.
std::string canonical_text(const nlohmann::json& j);

/// Writes report.json and one <configuration>.graph.json per graph.
std::vector<std::filesystem::path> export_json(const AnalysisReport& r, const std::filesystem::path& dir);

/// Graphviz text. Entities named by error issues in `issues` are highlighted.
std::string export_dot(const RosGraph& g, const IssueList& issues = {});

/// Appends one entry to dir/history.jsonl and returns the whole history.
std::vector<nlohmann::json> append_history(const AnalysisReport& r, const std::filesystem::path& dir);

std::string render_html(const AnalysisReport& r, const std::vector<nlohmann::json>& history);

/// index.html plus one .dot per graph; updates the history file.
std::vector<std::filesystem::path> export_html(const AnalysisReport& r, const std::filesystem::path& dir);

}  // namespace rosa
