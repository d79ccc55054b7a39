#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rosa/graph.hpp"
#include "rosa/hpl.hpp"
#include "rosa/report.hpp"
#include "rosa/testgen.hpp"
#include "rosa/workspace.hpp"

namespace rosa {

/// Analyses that --skip accepts.
const std::vector<std::string>& skippable_analyses();

struct PipelineOptions {
  std::filesystem::path project_file;
  std::optional<std::filesystem::path> home;  // defaults to the project file's directory
  std::optional<std::string> configuration;  // all configurations when empty
  std::optional<std::filesystem::path> queries;
  std::optional<std::filesystem::path> properties;
  std::optional<std::filesystem::path> trace;
  std::optional<std::string> adapter;  // shell command of the SUT adapter
  std::optional<std::string> sut_node;
  std::vector<std::string> sut_inputs;
  std::vector<std::string> sut_outputs;
  Budget budget;
  std::set<std::string> skip;
  bool ignore_hints = false;
};

/// A fatal failure, tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  ProjectSpec project;
  std::filesystem::path home;
  std::vector<Package> packages;
  MsgIndex msgs;
  ExtractionMap extractions;
  std::vector<PropertyEntry> properties;
  AnalysisReport report;
};

/// Indexing, launch interpretation, extraction with hints, graph building,
/// rules and queries, property type checking, then the optional trace check
/// and test campaign. Throws StageError.
PipelineResult run_pipeline(const PipelineOptions& options);

/// 0 without error issues, 1 otherwise.
int exit_code(const AnalysisReport& report);

}  // namespace rosa
