#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rosa/hpl.hpp"
#include "rosa/monitor.hpp"
#include "rosa/pipeline.hpp"
#include "rosa/report.hpp"
#include "rosa/trace.hpp"

namespace py = pybind11;

namespace {

std::string analyse(const std::string& project, const std::optional<std::string>& home,
                    const std::optional<std::string>& configuration, const std::vector<std::string>& skip) {
  rosa::PipelineOptions o;
  o.project_file = project;
  if (home) o.home = *home;
  o.configuration = configuration;
  o.skip = {skip.begin(), skip.end()};
  return rosa::to_json(rosa::run_pipeline(o).report).dump();
}

std::string dot(const std::string& project, const std::optional<std::string>& home, const std::string& configuration) {
  rosa::PipelineOptions o;
  o.project_file = project;
  if (home) o.home = *home;
  o.configuration = configuration;
  auto r = rosa::run_pipeline(o);
  return rosa::export_dot(r.report.graphs.at(0), r.report.issues);
}

std::string monitor(const std::string& property, const std::string& trace_text) {
  std::istringstream in(trace_text);
  rosa::Trace t = rosa::read_trace(in, "<trace>");
  return rosa::to_string(rosa::monitor_trace(rosa::parse_property(property), t).value);
}

}  // namespace

PYBIND11_MODULE(_rosa, m) {
  m.doc() = "ROS 1 static extraction and property checking";

  py::register_exception<rosa::StageError>(m, "StageError");
  py::register_exception<rosa::ParseError>(m, "ParseError");
  py::register_exception<rosa::TraceError>(m, "TraceError");

  m.def("analyse", &analyse, py::arg("project"), py::arg("home") = py::none(),
        py::arg("configuration") = py::none(), py::arg("skip") = std::vector<std::string>{},
        "Runs the analysis pipeline and returns the report as JSON text.");
  m.def("export_dot", &dot, py::arg("project"), py::arg("home") = py::none(), py::arg("configuration"));
  m.def("normalize_property", [](const std::string& text) { return rosa::print_property(rosa::parse_property(text)); },
        py::arg("text"));
  m.def("monitor", &monitor, py::arg("property"), py::arg("trace"),
        "Verdict of one property over a JSON Lines trace: true, false or inconclusive.");
}
