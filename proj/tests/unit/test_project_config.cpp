#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "rosa/project.hpp"
#include "support.hpp"

using namespace rosa;
using rosa::testing::kWorkspace;

namespace {

const char* kFictibot = R"(project: Fictibot
packages: ["fictibot_drivers", "fictibot_msgs", "fictibot_controller", "fictibot_multiplex"]
configurations:
  multiplex:
    launch: ["fictibot_controller/launch/multiplexer.launch"]
    hints:
      nodes:
        /ficticontrol:
          publishers:
            - topic: "/controller_cmd"
              msg_type: "std_msgs/Float64"
)";

}  // namespace

TEST_CASE("Fictibot project file with a publisher hint") {
  ProjectSpec proj = parse_project_text(kFictibot, "project.yaml");
  CHECK(proj.project_name == "Fictibot");
  CHECK(proj.packages ==
        std::vector<std::string>{"fictibot_drivers", "fictibot_msgs", "fictibot_controller", "fictibot_multiplex"});
  REQUIRE(proj.configurations.size() == 1);
  const ConfigSpec& c = proj.configurations.at("multiplex");
  CHECK(c.launch_files == std::vector<std::string>{"fictibot_controller/launch/multiplexer.launch"});
  REQUIRE(c.hints.nodes.contains("/ficticontrol"));
  const auto& pubs = c.hints.nodes.at("/ficticontrol").publishers;
  REQUIRE(pubs.size() == 1);
  CHECK(pubs[0].name == "/controller_cmd");
  CHECK(pubs[0].type == "std_msgs/Float64");
  CHECK_FALSE(pubs[0].queue_size);

  CHECK(parse_project_file(kWorkspace / "project.yaml") == proj);
}

TEST_CASE("minimal project with no configurations") {
  ProjectSpec proj = parse_project_text("project: P\npackages: []\nconfigurations: {}\n", "p.yaml");
  CHECK(proj.project_name == "P");
  CHECK(proj.configurations.empty());
}

TEST_CASE("launch path outside the package whitelist") {
  std::string text = kFictibot;
  text.replace(text.find("fictibot_controller/launch"), std::string("fictibot_controller").size(), "other_pkg");
  try {
    parse_project_text(text, "p.yaml");
    FAIL("accepted a launch path outside the whitelist");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("other_pkg/launch/multiplexer.launch") != std::string::npos);
  }
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(parse_project_text("packages: [a]\n", "p.yaml"), ValidationError);
  CHECK_THROWS_AS(parse_project_text("project: P\n", "p.yaml"), ValidationError);
  CHECK_THROWS_AS(parse_project_text("project: \"\"\npackages: []\n", "p.yaml"), ValidationError);
  CHECK_THROWS_AS(parse_project_text("project: P\npackages: [a, a]\n", "p.yaml"), ValidationError);
  CHECK_THROWS_AS(parse_project_text("project: P\npackages: [a/b]\n", "p.yaml"), ValidationError);
  CHECK_THROWS_AS(parse_project_text("project: P\npackages: [a]\nconfigurations:\n  c:\n    launch: []\n", "p.yaml"),
                  ValidationError);
  CHECK_THROWS_AS(parse_project_text(
                      "project: P\npackages: [a]\nconfigurations:\n  c:\n    launch: [a/x.launch]\n    hints:\n"
                      "      nodes:\n        relative:\n          publishers: []\n",
                      "p.yaml"),
                  ValidationError);
}

TEST_CASE("malformed markup reports its line") {
  try {
    parse_project_text("project: P\npackages: [a\n  - b: c\n", "p.yaml");
    FAIL("accepted malformed markup");
  } catch (const ParseError& e) {
    CHECK(e.loc().file == "p.yaml");
    CHECK(e.loc().line > 0);
  }
}

TEST_CASE("anchors and aliases are rejected") {
  CHECK_THROWS_AS(parse_project_text("project: &n P\npackages: [*n]\n", "p.yaml"), ParseError);
}

TEST_CASE("unknown keys are warnings") {
  IssueList warnings;
  std::string text = std::string(kFictibot) + "plugins: [cppcheck]\n";
  ProjectSpec proj = parse_project_text(text, "p.yaml", &warnings);
  CHECK(proj.project_name == "Fictibot");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].severity == Severity::warning);
  CHECK(warnings[0].message.find("plugins") != std::string::npos);
}

TEST_CASE("all hint kinds with queue sizes") {
  const char* text = R"(project: P
packages: [a]
configurations:
  c:
    launch: [a/x.launch]
    hints:
      nodes:
        /n:
          subscribers:
            - topic: /in
              msg_type: std_msgs/Int32
              queue_size: 5
          servers:
            - service: /srv
              srv_type: a/Do
          clients:
            - service: /other
          parameters:
            - name: /p
)";
  ProjectSpec proj = parse_project_text(text, "p.yaml");
  const NodeHints& h = proj.configurations.at("c").hints.nodes.at("/n");
  REQUIRE(h.subscribers.size() == 1);
  CHECK(h.subscribers[0].queue_size == 5);
  REQUIRE(h.servers.size() == 1);
  CHECK(h.servers[0].name == "/srv");
  CHECK(h.servers[0].type == "a/Do");
  REQUIRE(h.clients.size() == 1);
  CHECK(h.clients[0].type.empty());
  REQUIRE(h.parameters.size() == 1);
  CHECK(h.parameters[0].name == "/p");
}

TEST_CASE("round trip over random specs") {
  std::mt19937_64 rng(7);
  auto word = [&](const char* prefix) { return prefix + std::to_string(rng() % 50); };
  for (int iter = 0; iter < 200; ++iter) {
    ProjectSpec proj;
    proj.project_name = word("proj");
    std::set<std::string> pkgs;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i) pkgs.insert(word("pkg"));
    proj.packages.assign(pkgs.begin(), pkgs.end());
    for (int c = 0, n = static_cast<int>(rng() % 3); c < n; ++c) {
      ConfigSpec cfg;
      for (int l = 0, m = 1 + static_cast<int>(rng() % 2); l < m; ++l) {
        cfg.launch_files.push_back(proj.packages[rng() % proj.packages.size()] + "/launch/" + word("f") + ".launch");
      }
      for (int k = 0, m = static_cast<int>(rng() % 3); k < m; ++k) {
        NodeHints& h = cfg.hints.nodes["/" + word("node")];
        auto kind = static_cast<HintKind>(rng() % 5);
        ChannelHint hint{"/" + word("t"), kind == HintKind::parameters ? "" : word("pkg") + "/" + word("T"), {}};
        if (rng() % 2) hint.queue_size = static_cast<std::int64_t>(rng() % 100);
        h.of(kind).push_back(hint);
      }
      proj.configurations[word("cfg")] = cfg;
    }
    const std::string text = serialize_project(proj);
    ProjectSpec back = parse_project_text(text, "p.yaml");
    REQUIRE(back == proj);
    CHECK(serialize_project(back) == text);
    CHECK(parse_project_text(text, "p.yaml") == back);
  }
}

TEST_CASE("split_package_path") {
  CHECK(split_package_path("fictibot_controller/launch/multiplexer.launch") ==
        std::pair<std::string, std::string>{"fictibot_controller", "launch/multiplexer.launch"});
}
