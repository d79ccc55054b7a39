#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "rosa/workspace.hpp"
#include "support.hpp"

using namespace rosa;
using rosa::testing::kWorkspace;
using rosa::testing::TempDir;

namespace {

ProjectSpec fictibot_spec() { return parse_project_file(kWorkspace / "project.yaml"); }

std::size_t count_rule(const IssueList& issues, const std::string& rule) {
  return std::count_if(issues.begin(), issues.end(), [&](const Issue& i) { return i.rule == rule; });
}

const char* kManifest = "<package format=\"2\"><name>%s</name></package>";

std::string manifest(const std::string& name) {
  std::string m = kManifest;
  return m.replace(m.find("%s"), 2, name);
}

}  // namespace

TEST_CASE("the four Fictibot packages") {
  IssueList issues;
  auto pkgs = index_workspace(kWorkspace, fictibot_spec(), issues);
  REQUIRE(pkgs.size() == 4);
  std::vector<std::string> names;
  for (const auto& p : pkgs) names.push_back(p.name);
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"fictibot_controller", "fictibot_drivers", "fictibot_msgs",
                                          "fictibot_multiplex"});
  CHECK(count_rule(issues, "package-not-found") == 0);

  const Package* msgs = find_package(pkgs, "fictibot_msgs");
  REQUIRE(msgs != nullptr);
  REQUIRE(msgs->msg_defs.size() == 1);
  CHECK(msgs->msg_defs[0].qualified_name == "fictibot_msgs/BumperEvent");
  CHECK(msgs->msg_defs[0].constants.size() == 3);

  const Package* ctrl = find_package(pkgs, "fictibot_controller");
  REQUIRE(ctrl != nullptr);
  CHECK(ctrl->launch_files.size() == 2);
  for (const auto& f : ctrl->source_files) {
    CHECK(f.dialect == Dialect::py);
    CHECK(f.display.starts_with("fictibot_controller/"));
  }
}

TEST_CASE("empty directory reports each missing package") {
  TempDir dir;
  IssueList issues;
  auto pkgs = index_workspace(dir.path(), fictibot_spec(), issues);
  CHECK(pkgs.empty());
  CHECK(count_rule(issues, "package-not-found") == 4);
}

TEST_CASE("missing workspace root is fatal") {
  IssueList issues;
  CHECK_THROWS_AS(index_workspace(kWorkspace / "does-not-exist", fictibot_spec(), issues), Error);
}

TEST_CASE("packages outside the whitelist are ignored") {
  TempDir dir;
  dir.write("a/package.xml", manifest("a"));
  dir.write("extra/package.xml", manifest("extra"));
  ProjectSpec proj;
  proj.project_name = "P";
  proj.packages = {"a"};
  IssueList issues;
  auto pkgs = index_workspace(dir.path(), proj, issues);
  REQUIRE(pkgs.size() == 1);
  CHECK(pkgs[0].name == "a");
}

TEST_CASE("package name comes from the manifest") {
  TempDir dir;
  dir.write("src/some_dir/package.xml", manifest("a"));
  ProjectSpec proj;
  proj.project_name = "P";
  proj.packages = {"a"};
  IssueList issues;
  auto pkgs = index_workspace(dir.path(), proj, issues);
  REQUIRE(pkgs.size() == 1);
  CHECK(pkgs[0].name == "a");
  CHECK(pkgs[0].display_root == "src/some_dir");
}

TEST_CASE("dialect from extension") {
  for (const char* f : {"a.c", "a.cc", "a.cpp", "a.h", "a.hpp"}) CHECK(dialect_for(f) == Dialect::cpp);
  CHECK(dialect_for("a.py") == Dialect::py);
  CHECK_FALSE(dialect_for("a.launch"));
  CHECK_FALSE(dialect_for("CMakeLists.txt"));
}

TEST_CASE("message definitions") {
  SUBCASE("single field") {
    auto def = parse_msg_text("uint8 data\n", "p/T", "T.msg");
    REQUIRE(def.fields.size() == 1);
    CHECK(def.fields[0].name == "data");
    CHECK(to_string(def.fields[0].type) == "uint8");
  }
  SUBCASE("std_msgs/Float64 matches the hint type") {
    const auto& f64 = builtin_messages().at("std_msgs/Float64");
    REQUIRE(f64.fields.size() == 1);
    CHECK(f64.fields[0].name == "data");
    CHECK(to_string(f64.fields[0].type) == "float64");
  }
  SUBCASE("fixed array and trailing comment") {
    auto def = parse_msg_text("int32[4] a\nstring b # note\n", "p/T", "T.msg");
    REQUIRE(def.fields.size() == 2);
    CHECK(def.fields[0].name == "a");
    CHECK(def.fields[0].type.is_array);
    CHECK(def.fields[0].type.fixed_size == 4u);
    CHECK(def.fields[0].type.builtin() == Builtin::int32);
    CHECK(def.fields[1].name == "b");
    CHECK(def.fields[1].type.builtin() == Builtin::string);
    CHECK_FALSE(def.fields[1].type.is_array);
  }
  SUBCASE("constants") {
    auto def = parse_msg_text("int8 LEFT=1\nstring NAME=hello world\nint8 data\n", "p/T", "T.msg");
    REQUIRE(def.constants.size() == 2);
    CHECK(def.constants[0].name == "LEFT");
    CHECK(def.constants[0].literal == "1");
    CHECK(def.constants[1].literal == "hello world");
    CHECK(def.fields.size() == 1);
  }
  SUBCASE("unbounded array of a nested type") {
    auto def = parse_msg_text("Header header\ngeometry_msgs/Point[] points\n", "p/T", "T.msg");
    CHECK(def.fields[0].type.nested() == "std_msgs/Header");
    CHECK(def.fields[1].type.is_array);
    CHECK_FALSE(def.fields[1].type.fixed_size);
    CHECK(def.fields[1].type.nested() == "geometry_msgs/Point");
  }
  SUBCASE("errors") {
    try {
      parse_msg_text("uint7 data\n", "p/T", "T.msg");
      FAIL("accepted an unknown builtin");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("uint7") != std::string::npos);
      CHECK(e.loc().line == 1);
    }
    CHECK_THROWS_AS(parse_msg_text("int8 a\nint16 a\n", "p/T", "T.msg"), ParseError);
    CHECK_THROWS_AS(parse_msg_text("int8\n", "p/T", "T.msg"), ParseError);
  }
}

TEST_CASE("unresolvable nested type") {
  MsgIndex index = builtin_messages();
  index["p/T"] = parse_msg_text("q/Missing inner\n", "p/T", "T.msg");
  IssueList issues = check_nested_types(index);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].message.find("q/Missing") != std::string::npos);
}

TEST_CASE("build-file target association") {
  IssueList issues;
  auto pkgs = index_workspace(kWorkspace, fictibot_spec(), issues);

  auto drivers = associate_targets(*find_package(pkgs, "fictibot_drivers"), issues);
  REQUIRE(drivers.size() == 1);
  CHECK(drivers[0].package == "fictibot_drivers");
  CHECK(drivers[0].target_name == "fictibot_driver");
  REQUIRE(drivers[0].sources.size() == 1);
  CHECK(drivers[0].sources[0].display == "fictibot_drivers/src/fictibot_driver.cpp");

  auto mux = associate_targets(*find_package(pkgs, "fictibot_multiplex"), issues);
  REQUIRE(mux.size() == 1);
  CHECK(mux[0].target_name == "fictibot_multiplex");
  CHECK(mux[0].sources.size() == 2);

  auto ctrl = associate_targets(*find_package(pkgs, "fictibot_controller"), issues);
  REQUIRE(ctrl.size() == 2);
  CHECK(ctrl[0].target_name == "legacy_logger.py");
  CHECK(ctrl[1].target_name == "random_controller.py");

  CHECK(associate_targets(*find_package(pkgs, "fictibot_msgs"), issues).empty());
}

TEST_CASE("target association edge cases") {
  TempDir dir;
  dir.write("a/package.xml", manifest("a"));
  dir.write("a/CMakeLists.txt",
            "project(a)\nadd_executable(x src/x.cpp src/gone.cpp)\nadd_executable(${OTHER} src/x.cpp)\n");
  dir.write("a/src/x.cpp", "int main() {}\n");
  dir.write("b/package.xml", manifest("b"));
  ProjectSpec proj;
  proj.project_name = "P";
  proj.packages = {"a", "b"};
  IssueList issues;
  auto pkgs = index_workspace(dir.path(), proj, issues);

  IssueList a_issues;
  auto a = associate_targets(*find_package(pkgs, "a"), a_issues);
  REQUIRE(a.size() == 1);
  CHECK(a[0].target_name == "x");
  CHECK(a[0].sources.size() == 1);
  CHECK(count_rule(a_issues, "missing-source") == 1);
  CHECK(count_rule(a_issues, "build-variable") == 1);

  IssueList b_issues;
  CHECK(associate_targets(*find_package(pkgs, "b"), b_issues).empty());
  REQUIRE(b_issues.size() == 1);
  CHECK(b_issues[0].severity == Severity::info);
}

TEST_CASE("message index") {
  IssueList issues;
  auto pkgs = index_workspace(kWorkspace, fictibot_spec(), issues);
  MsgIndex index = build_msg_index(pkgs);
  CHECK(index.contains("fictibot_msgs/BumperEvent"));
  CHECK(index.contains("std_msgs/Empty"));
  CHECK(lookup_short_name(index, "BumperEvent") == "fictibot_msgs/BumperEvent");
  CHECK(check_nested_types(index).empty());
}
