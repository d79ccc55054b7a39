#include "rosa/pipeline.hpp"

#include "rosa/launch.hpp"
#include "rosa/query.hpp"
#include "rosa/trace.hpp"

namespace rosa {

const std::vector<std::string>& skippable_analyses() {
  static const std::vector<std::string> names{"builtin-rules", "queries", "hpl-typecheck", "trace-check",
                                              "test-generation"};
  return names;
}

StageError::StageError(std::string stage, const std::string& message)
    : Error(message), stage_(std::move(stage)) {}

int exit_code(const AnalysisReport& report) { return has_errors(report.issues) ? 1 : 0; }

namespace {

template <typename F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(name, e.what());
  } catch (const TraceError& e) {
    throw StageError(name, e.what());
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string relative_display(const std::filesystem::path& p, const std::filesystem::path& home) {
  std::error_code ec;
  auto rel = std::filesystem::relative(p, home, ec);
  if (ec || rel.empty() || rel.native().starts_with("..")) return p.filename().string();
  return rel.generic_string();
}

}  // namespace

PipelineResult run_pipeline(const PipelineOptions& options) {
  PipelineResult out;
  IssueList& issues = out.report.issues;
  auto skipped = [&](const char* name) { return options.skip.contains(name); };

  out.project = stage("project", [&] {
    if (!std::filesystem::exists(options.project_file)) {
      throw Error("project file " + options.project_file.string() + " does not exist");
    }
    return parse_project_file(options.project_file, &issues);
  });
  out.report.project = out.project.project_name;
  out.home = options.home ? *options.home : std::filesystem::absolute(options.project_file).parent_path();

  std::vector<std::string> configs;
  for (const auto& [name, cfg] : out.project.configurations) {
    if (!options.configuration || *options.configuration == name) configs.push_back(name);
  }
  if (options.configuration && configs.empty()) {
    throw StageError("project", "no configuration named " + *options.configuration);
  }

  stage("indexing", [&] {
    out.packages = index_workspace(out.home, out.project, issues);
    out.msgs = build_msg_index(out.packages);
    for (auto& i : check_nested_types(out.msgs)) issues.push_back(std::move(i));
    out.report.sources.packages = out.packages.size();
    for (const auto& pkg : out.packages) {
      for (const auto& f : pkg.source_files) {
        ++out.report.sources.files[to_string(f.dialect)];
        out.report.sources.lines[to_string(f.dialect)] += f.line_count;
      }
    }
    return 0;
  });

  stage("extraction", [&] {
    for (const auto& pkg : out.packages) {
      for (const auto& target : associate_targets(pkg, issues)) {
        out.extractions[target.package + "/" + target.target_name] = extract_node(target, out.msgs, issues);
      }
    }
    return 0;
  });

  for (const auto& name : configs) {
    const ConfigSpec& cfg = out.project.configurations.at(name);
    LaunchInterpretation launch = stage("launch", [&] { return interpret_launch(cfg, out.packages, issues); });
    RosGraph g = stage("graph", [&] {
      RosGraph built = build_graph(name, launch, out.extractions, options.ignore_hints ? HintSet{} : cfg.hints, issues);
      check_integrity(built);
      return built;
    });
    out.report.graphs.push_back(std::move(g));
  }

  stage("queries", [&] {
    std::vector<Query> user;
    if (options.queries && !skipped("queries")) user = load_query_file(*options.queries);
    for (const auto& g : out.report.graphs) {
      if (!skipped("builtin-rules")) {
        for (auto& i : builtin_rules(g)) issues.push_back(std::move(i));
      }
      for (const auto& q : user) {
        for (auto& i : run_query(q, g)) issues.push_back(std::move(i));
      }
    }
    return 0;
  });

  if (options.properties) {
    out.properties = stage("properties", [&] {
      return load_properties(*options.properties, relative_display(*options.properties, out.home), issues);
    });
    if (!skipped("hpl-typecheck")) {
      stage("hpl-typecheck", [&] {
        for (const auto& g : out.report.graphs) {
          for (const auto& p : out.properties) {
            for (auto& i : typecheck_property(p.property, g, out.msgs, p.loc)) issues.push_back(std::move(i));
          }
        }
        return 0;
      });
    }
  }

  const RosGraph* graph = out.report.graphs.size() == 1 ? &out.report.graphs.front() : nullptr;

  if (options.trace && !skipped("trace-check")) {
    stage("trace-check", [&] {
      Trace t = load_trace(*options.trace);
      out.report.property_results = check_trace(out.properties, t, graph, graph ? &out.msgs : nullptr);
      for (const auto& r : out.report.property_results) {
        if (r.verdict.value == Truth::false_verdict) {
          issues.push_back(make_issue(Severity::error, Category::runtime, "property-violated", EntityScope{r.property_id},
                                      r.property_text + " is violated: " + r.verdict.explanation));
        } else if (r.verdict.value == Truth::inconclusive) {
          issues.push_back(make_issue(Severity::info, Category::runtime, "property-inconclusive",
                                      EntityScope{r.property_id}, r.property_text + " is inconclusive on this trace"));
        }
      }
      return 0;
    });
  }

  if (options.adapter && !skipped("test-generation")) {
    stage("test-generation", [&] {
      if (graph == nullptr) throw Error("test generation needs exactly one configuration");
      SutChannels sut = infer_sut_channels(*graph, options.sut_node);
      if (!options.sut_inputs.empty()) sut.inputs = {options.sut_inputs.begin(), options.sut_inputs.end()};
      if (!options.sut_outputs.empty()) sut.outputs = {options.sut_outputs.begin(), options.sut_outputs.end()};
      ChannelTypes types = input_types(sut, *graph, out.msgs);
      ProcessAdapter adapter(*options.adapter);
      for (const auto& p : out.properties) {
        TestSchema schema;
        try {
          schema = derive_schema(p.property, sut);
        } catch (const ValidationError& e) {
          issues.push_back(make_issue(Severity::warning, Category::testing, "untestable", EntityScope{p.id()},
                                      e.what()));
          continue;
        }
        CampaignResult r = run_campaign(schema, adapter, types, out.msgs, options.budget);
        for (auto& w : r.warnings) issues.push_back(std::move(w));
        if (r.counterexample) {
          issues.push_back(make_issue(Severity::error, Category::testing, "counterexample", EntityScope{p.id()},
                                      print_property(p.property) + " falsified after " + std::to_string(r.traces_run) +
                                          " traces; counterexample has " +
                                          std::to_string(r.counterexample->inputs.events.size()) + " inputs"));
        }
        auto record = campaign_record(schema, options.budget, r);
        record["property_id"] = p.id();
        out.report.campaign_results.push_back(std::move(record));
      }
      return 0;
    });
  }

  assign_issue_ids(issues);
  out.report.statistics = total_statistics(out.report.graphs);
  return out;
}

}  // namespace rosa
