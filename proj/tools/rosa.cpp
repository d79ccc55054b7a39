#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rosa/pipeline.hpp"
#include "rosa/report.hpp"

namespace {

struct Common {
  std::string project;
  std::string home;
  std::string config;
  std::string export_dir;
  std::vector<std::string> skip;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  cmd->add_option("-p,--project", c.project, "project file")->required();
  cmd->add_option("--home", c.home, "workspace root (default: project file directory)");
  auto* cfg = cmd->add_option("--config", c.config, "configuration name");
  if (config_required) cfg->required();
  cmd->add_option("--export-dir", c.export_dir, "write JSON, DOT and HTML exports here");
  cmd->add_option("--skip", c.skip, "analysis to skip")->check(CLI::IsMember(rosa::skippable_analyses()));
}

rosa::PipelineOptions options_from(const Common& c) {
  rosa::PipelineOptions o;
  o.project_file = c.project;
  if (!c.home.empty()) o.home = c.home;
  if (!c.config.empty()) o.configuration = c.config;
  o.skip = {c.skip.begin(), c.skip.end()};
  return o;
}

void print_summary(const rosa::AnalysisReport& r) {
  for (const auto& i : r.issues) {
    std::cout << rosa::to_string(i.severity) << " " << i.id << ": " << i.message << "\n";
  }
  for (const auto& p : r.property_results) {
    std::cout << "property " << p.property_id << " " << rosa::to_string(p.verdict.value) << ": " << p.property_text
              << "\n";
  }
  for (const auto& c : r.campaign_results) {
    std::cout << "campaign " << c.value("property_id", "") << ": " << c["traces_run"] << " traces, "
              << (c["falsified"].get<bool>() ? "falsified" : "no counterexample") << "\n";
  }
  const auto& s = r.statistics;
  std::cout << s.nodes << " nodes, " << s.topics << " topics, " << s.services << " services, " << s.parameters
            << " parameters, " << s.links << " links, " << r.issues.size() << " issues\n";
}

void export_all(const rosa::AnalysisReport& r, const std::string& dir) {
  if (dir.empty()) return;
  rosa::export_json(r, dir);
  rosa::export_html(r, dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static extraction, querying and verification of ROS 1 applications"};
  app.require_subcommand(1);

  Common analyse_opts;
  std::string queries, properties;
  auto* analyse = app.add_subcommand("analyse", "build runtime models and report issues");
  add_common(analyse, analyse_opts, false);
  analyse->add_option("--queries", queries, "query file");
  analyse->add_option("--properties", properties, "property file");
  bool no_hints = false;
  analyse->add_flag("--no-hints", no_hints, "ignore extraction hints");

  Common trace_opts;
  std::string trace_props, trace_file;
  auto* check = app.add_subcommand("check-trace", "check properties against a recorded trace");
  add_common(check, trace_opts, true);
  check->add_option("--properties", trace_props, "property file")->required();
  check->add_option("--trace", trace_file, "JSON Lines trace")->required();

  Common gen_opts;
  std::string gen_props, adapter, node;
  std::vector<std::string> inputs, outputs;
  rosa::Budget budget;
  auto* gen = app.add_subcommand("gen-tests", "property-based testing against an adapter");
  add_common(gen, gen_opts, true);
  gen->add_option("--properties", gen_props, "property file")->required();
  gen->add_option("--adapter", adapter, "adapter command")->required();
  gen->add_option("--seed", budget.seed, "generation seed");
  gen->add_option("--max-traces", budget.max_traces, "trace budget");
  gen->add_option("--max-events", budget.max_events_per_trace, "events per trace");
  gen->add_option("--node", node, "node under test");
  gen->add_option("--inputs", inputs, "input topics");
  gen->add_option("--outputs", outputs, "output topics");

  Common export_opts;
  std::string format = "json", out_dir;
  auto* exp = app.add_subcommand("export", "export models and reports");
  add_common(exp, export_opts, false);
  exp->add_option("--format", format, "json, dot or html")->check(CLI::IsMember({"json", "dot", "html"}));
  exp->add_option("-o,--out", out_dir, "output directory (dot prints to stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (analyse->parsed()) {
      auto o = options_from(analyse_opts);
      if (!queries.empty()) o.queries = queries;
      if (!properties.empty()) o.properties = properties;
      o.ignore_hints = no_hints;
      auto r = rosa::run_pipeline(o);
      print_summary(r.report);
      export_all(r.report, analyse_opts.export_dir);
      return rosa::exit_code(r.report);
    }
    if (check->parsed()) {
      auto o = options_from(trace_opts);
      o.properties = trace_props;
      o.trace = trace_file;
      auto r = rosa::run_pipeline(o);
      print_summary(r.report);
      export_all(r.report, trace_opts.export_dir);
      return rosa::exit_code(r.report);
    }
    if (gen->parsed()) {
      auto o = options_from(gen_opts);
      o.properties = gen_props;
      o.adapter = adapter;
      o.budget = budget;
      if (!node.empty()) o.sut_node = node;
      o.sut_inputs = inputs;
      o.sut_outputs = outputs;
      auto r = rosa::run_pipeline(o);
      print_summary(r.report);
      export_all(r.report, gen_opts.export_dir);
      return rosa::exit_code(r.report);
    }
    auto r = rosa::run_pipeline(options_from(export_opts));
    if (out_dir.empty()) out_dir = export_opts.export_dir;
    if (format == "dot" && out_dir.empty()) {
      for (const auto& g : r.report.graphs) std::cout << rosa::export_dot(g, r.report.issues);
    } else if (out_dir.empty()) {
      std::cerr << "rosa: export --format " << format << " needs --out\n";
      return 2;
    } else if (format == "json") {
      rosa::export_json(r.report, out_dir);
    } else if (format == "html") {
      rosa::export_html(r.report, out_dir);
    } else {
      std::filesystem::create_directories(out_dir);
      for (const auto& g : r.report.graphs) {
        std::ofstream(std::filesystem::path(out_dir) / (g.configuration + ".dot")) << rosa::export_dot(g, r.report.issues);
      }
    }
    return rosa::exit_code(r.report);
  } catch (const rosa::StageError& e) {
    std::cerr << "rosa: " << e.stage() << " stage failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rosa: export failed: " << e.what() << "\n";
    return 2;
  }
}
