#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "rosa/extract.hpp"
#include "support.hpp"

using namespace rosa;
using rosa::testing::kWorkspace;
using rosa::testing::TempDir;

namespace {

NodeExtraction extract_text(const std::string& file, const std::string& text, IssueList* issues = nullptr) {
  static TempDir dir;
  auto path = dir.write(file, text);
  SourceFile src{path, "pkg/" + file, *dialect_for(path), 0};
  IssueList local;
  return extract_node(NodeTarget{"pkg", "node", {src}}, builtin_messages(), issues ? *issues : local);
}

Unknowable<std::string> lit(const std::string& s) { return s; }
Unknowable<std::string> unk() { return Unknowable<std::string>::unknown(); }

NodeExtraction fixture_extraction(const std::string& package, const std::string& target) {
  ProjectSpec proj = parse_project_file(kWorkspace / "project.yaml");
  IssueList issues;
  auto pkgs = index_workspace(kWorkspace, proj, issues);
  MsgIndex msgs = build_msg_index(pkgs);
  for (const auto& t : associate_targets(*find_package(pkgs, package), issues)) {
    if (t.target_name == target) return extract_node(t, msgs, issues);
  }
  FAIL("no such target");
  return {};
}

}  // namespace

TEST_CASE("python publisher at top level") {
  auto ex = extract_text("state.py",
                         "import rospy\nfrom std_msgs.msg import Int32\n"
                         "pub = rospy.Publisher(\"state\", Int32, queue_size=10)\n");
  REQUIRE(ex.calls.size() == 1);
  const auto& c = ex.calls[0];
  CHECK(c.kind == CallKind::advertise);
  CHECK(c.name == lit("state"));
  CHECK(c.type == lit("std_msgs/Int32"));
  REQUIRE(c.queue_size);
  CHECK(*c.queue_size == Unknowable<std::int64_t>(10));
  CHECK_FALSE(c.conditional);
  CHECK(c.loc == SourceLoc{"pkg/state.py", 3});
  CHECK(c.provenance == Provenance::source);
}

TEST_CASE("cpp advertise with a variable name") {
  auto ex = extract_text("a.cpp",
                         "#include <ros/ros.h>\nint main() {\n  ros::NodeHandle nh;\n  std::string topic_var = \"x\";\n"
                         "  ros::Publisher p = nh.advertise<std_msgs::Float64>(topic_var, 1);\n}\n");
  REQUIRE(ex.calls.size() == 1);
  const auto& c = ex.calls[0];
  CHECK(c.kind == CallKind::advertise);
  CHECK_FALSE(c.name.known());
  CHECK(c.name.text() == "topic_var");
  CHECK(c.type == lit("std_msgs/Float64"));
  CHECK(*c.queue_size == Unknowable<std::int64_t>(1));
}

TEST_CASE("conditional subscriber in the multiplexer") {
  auto ex = fixture_extraction("fictibot_multiplex", "fictibot_multiplex");
  std::vector<const ExtractedCall*> conditional;
  for (const auto& c : ex.calls) {
    if (c.conditional) conditional.push_back(&c);
  }
  REQUIRE(conditional.size() == 1);
  CHECK(conditional[0]->kind == CallKind::subscribe);
  CHECK(conditional[0]->name == lit("teleop_cmd"));
  CHECK(conditional[0]->condition_text == "priority > 0");
  CHECK(conditional[0]->type == lit("std_msgs/Float64"));
  CHECK(conditional[0]->loc == SourceLoc{"fictibot_multiplex/src/multiplexer.cpp", 20});
}

TEST_CASE("cpp call forms") {
  const char* text = R"x(#include <ros/ros.h>
bool handle(my_pkg::Reset::Request& req, my_pkg::Reset::Response& res) { return true; }
void on_scan(const sensor_msgs::LaserScan::ConstPtr& msg) {}
int main(int argc, char** argv) {
  ros::NodeHandle nh;
  ros::NodeHandle pnh("~");
  ros::NodeHandle named("arm");
  // nh.advertise<std_msgs::String>("commented", 1);
  const char* s = "nh.advertise<std_msgs::String>(\"in_string\", 1)";
  ros::ServiceServer srv = nh.advertiseService("reset", handle);
  ros::ServiceClient cli = nh.serviceClient<my_pkg::Reset>("/other/reset");
  ros::Subscriber sub = pnh.subscribe("scan", 5, on_scan);
  auto lam = nh.subscribe<std_msgs::Bool>("flag", 1, [](const std_msgs::Bool::ConstPtr& m) {});
  double gain;
  named.getParam("gain", gain);
  nh.setParam("/mode", 2);
  ros::param::get("global_param", gain);
  for (int i = 0; i < 3; ++i) {
    nh.advertise<std_msgs::Int32>("looped", 1);
  }
  if (argc > 1)
    nh.advertise<std_msgs::Int32>("single", 1);
  else
    nh.advertise<std_msgs::Int32>("other", 1);
  if (argc > 2 &&
      argc < 10) {
    nh.advertise<std_msgs::Int32>("multiline", 1);
  }
  return 0;
}
)x";
  auto ex = extract_text("forms.cpp", text);
  std::map<std::string, const ExtractedCall*> by_name;
  for (const auto& c : ex.calls) by_name[c.name.known() ? c.name.value() : c.name.text()] = &c;

  CHECK_FALSE(by_name.contains("commented"));
  CHECK_FALSE(by_name.contains("in_string"));
  REQUIRE(by_name.contains("reset"));
  CHECK(by_name["reset"]->kind == CallKind::service_server);
  CHECK(by_name["reset"]->type == lit("my_pkg/Reset"));
  REQUIRE(by_name.contains("/other/reset"));
  CHECK(by_name["/other/reset"]->kind == CallKind::service_client);
  CHECK(by_name["/other/reset"]->type == lit("my_pkg/Reset"));
  REQUIRE(by_name.contains("~scan"));
  CHECK(by_name["~scan"]->type == lit("sensor_msgs/LaserScan"));
  CHECK(*by_name["~scan"]->queue_size == Unknowable<std::int64_t>(5));
  REQUIRE(by_name.contains("flag"));
  CHECK(by_name["flag"]->type == lit("std_msgs/Bool"));
  REQUIRE(by_name.contains("arm/gain"));
  CHECK(by_name["arm/gain"]->kind == CallKind::param_read);
  REQUIRE(by_name.contains("/mode"));
  CHECK(by_name["/mode"]->kind == CallKind::param_write);
  REQUIRE(by_name.contains("global_param"));
  CHECK(by_name["global_param"]->kind == CallKind::param_read);

  REQUIRE(by_name.contains("looped"));
  CHECK_FALSE(by_name["looped"]->conditional);
  REQUIRE(by_name.contains("single"));
  CHECK(by_name["single"]->conditional);
  CHECK(by_name["single"]->condition_text == "argc > 1");
  REQUIRE(by_name.contains("other"));
  CHECK(by_name["other"]->conditional);
  CHECK(by_name["other"]->condition_text == "!(argc > 1)");
  REQUIRE(by_name.contains("multiline"));
  CHECK(by_name["multiline"]->conditional);
  CHECK(by_name["multiline"]->condition_text.empty());

  for (std::size_t i = 1; i < ex.calls.size(); ++i) CHECK(ex.calls[i - 1].loc <= ex.calls[i].loc);
}

TEST_CASE("python call forms") {
  const char* text = R"x(import rospy
import std_msgs.msg as sm
from my_pkg.srv import Reset as R
from std_msgs.msg import Float64


def main(mode):
    rospy.Subscriber("odom", sm.Float64, cb, queue_size=3)
    if mode == "a":
        rospy.Service("reset", R, handler)
    elif mode == "b":
        rospy.ServiceProxy(name="/other", service_class=R)
    else:
        rospy.set_param("~mode", mode)
    while True:
        rospy.Publisher("looped", data_class=Float64, queue_size=1)
    rospy.get_param("/global")


if __name__ == "__main__":
    rospy.Publisher("top", Float64)
)x";
  auto ex = extract_text("forms.py", text);
  std::map<std::string, const ExtractedCall*> by_name;
  for (const auto& c : ex.calls) by_name[c.name.value()] = &c;
  REQUIRE(by_name.size() == 7);
  CHECK(by_name["odom"]->type == lit("std_msgs/Float64"));
  CHECK(*by_name["odom"]->queue_size == Unknowable<std::int64_t>(3));
  CHECK(by_name["reset"]->kind == CallKind::service_server);
  CHECK(by_name["reset"]->type == lit("my_pkg/Reset"));
  CHECK(by_name["reset"]->condition_text == "mode == \"a\"");
  CHECK(by_name["/other"]->kind == CallKind::service_client);
  CHECK(by_name["/other"]->type == lit("my_pkg/Reset"));
  CHECK(by_name["/other"]->condition_text == "mode == \"b\"");
  CHECK(by_name["~mode"]->kind == CallKind::param_write);
  CHECK(by_name["~mode"]->conditional);
  CHECK(by_name["/global"]->kind == CallKind::param_read);
  CHECK_FALSE(by_name["/global"]->conditional);
  CHECK_FALSE(by_name["looped"]->conditional);
  CHECK(by_name["looped"]->type == lit("std_msgs/Float64"));
  CHECK_FALSE(by_name["top"]->conditional);
  CHECK_FALSE(by_name["top"]->queue_size);
}

TEST_CASE("no calls and unreadable files") {
  CHECK(extract_text("empty.cpp", "int main() { return 0; }\n").calls.empty());
  IssueList issues;
  SourceFile missing{"/nonexistent/x.cpp", "pkg/x.cpp", Dialect::cpp, 0};
  auto ex = extract_node(NodeTarget{"pkg", "node", {missing}}, builtin_messages(), issues);
  CHECK(ex.calls.empty());
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].message.find("pkg/x.cpp") != std::string::npos);
}

TEST_CASE("hint fusion on the random controller") {
  auto ex = fixture_extraction("fictibot_controller", "random_controller.py");
  ProjectSpec proj = parse_project_file(kWorkspace / "project.yaml");
  const HintSet& hints = proj.configurations.at("multiplex").hints;

  const ExtractedCall* raw_pub = nullptr;
  for (const auto& c : ex.calls) {
    if (c.kind == CallKind::advertise) raw_pub = &c;
  }
  REQUIRE(raw_pub != nullptr);
  CHECK_FALSE(raw_pub->name.known());
  CHECK_FALSE(raw_pub->type.known());

  IssueList issues;
  auto fused = fuse_hints(ex, hints, "/ficticontrol", issues);
  CHECK(issues.empty());
  std::vector<const ExtractedCall*> pubs;
  for (const auto& c : fused.calls) {
    if (c.kind == CallKind::advertise) pubs.push_back(&c);
  }
  REQUIRE(pubs.size() == 1);
  CHECK(pubs[0]->name == lit("/controller_cmd"));
  CHECK(pubs[0]->type == lit("std_msgs/Float64"));
  CHECK(pubs[0]->provenance == Provenance::hint);
  CHECK(pubs[0]->loc == raw_pub->loc);

  SUBCASE("idempotent") { CHECK(fuse_hints(fused, hints, "/ficticontrol", issues) == fused); }
  SUBCASE("hints for other nodes do not apply") { CHECK(fuse_hints(ex, hints, "/fictimux", issues) == ex); }
  SUBCASE("empty hints") { CHECK(fuse_hints(ex, HintSet{}, "/ficticontrol", issues) == ex); }
}

TEST_CASE("hint merge rules") {
  NodeExtraction ex;
  ExtractedCall unknown_name{CallKind::advertise, unk(), lit("std_msgs/Int32"), {}, false, "", SourceLoc{"f", 1}};
  ex.calls.push_back(unknown_name);
  HintSet hints;
  hints.nodes["/n"].publishers.push_back({"/x", "std_msgs/Int32", {}});
  IssueList issues;

  auto fused = fuse_hints(ex, hints, "/n", issues);
  REQUIRE(fused.calls.size() == 1);
  CHECK(fused.calls[0].name == lit("/x"));
  CHECK(fused.calls[0].provenance == Provenance::hint);

  SUBCASE("unmatched hints are appended") {
    HintSet more = hints;
    more.nodes["/n"].subscribers.push_back({"/y", "std_msgs/Bool", 3});
    auto f2 = fuse_hints(ex, more, "/n", issues);
    REQUIRE(f2.calls.size() == 2);
    CHECK(f2.calls[1].kind == CallKind::subscribe);
    CHECK(f2.calls[1].name == lit("/y"));
    CHECK(f2.calls[1].provenance == Provenance::hint);
    CHECK(*f2.calls[1].queue_size == Unknowable<std::int64_t>(3));
    CHECK_FALSE(f2.calls[1].loc);
  }

  SUBCASE("a conflicting type is reported and the hint wins") {
    NodeExtraction known;
    known.calls.push_back({CallKind::advertise, lit("/x"), lit("std_msgs/Float64"), {}, false, "", SourceLoc{"f", 2}});
    IssueList conflicts;
    auto f3 = fuse_hints(known, hints, "/n", conflicts);
    REQUIRE(f3.calls.size() == 1);
    CHECK(f3.calls[0].type == lit("std_msgs/Int32"));
    REQUIRE(conflicts.size() == 1);
    CHECK(conflicts[0].rule == "hint-conflict");
  }
}

TEST_CASE("fusion is monotone over resolved names") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> names{"/a", "/b", "/c"};
  const std::vector<std::string> types{"std_msgs/Int32", "std_msgs/Bool"};
  for (int iter = 0; iter < 300; ++iter) {
    NodeExtraction ex;
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) {
      ExtractedCall c;
      c.kind = static_cast<CallKind>(rng() % 2);
      c.name = rng() % 3 ? lit(names[rng() % 3]) : unk();
      c.type = rng() % 3 ? lit(types[rng() % 2]) : unk();
      c.loc = SourceLoc{"f", i + 1};
      ex.calls.push_back(c);
    }
    HintSet hints;
    for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i) {
      auto kind = rng() % 2 ? HintKind::publishers : HintKind::subscribers;
      hints.nodes["/n"].of(kind).push_back({names[rng() % 3], types[rng() % 2], {}});
    }
    IssueList issues;
    auto fused = fuse_hints(ex, hints, "/n", issues);
    auto resolved = [](const NodeExtraction& e) {
      std::set<std::pair<CallKind, std::string>> out;
      for (const auto& c : e.calls) {
        if (c.name.known()) out.emplace(c.kind, c.name.value());
      }
      return out;
    };
    auto before = resolved(ex);
    auto after = resolved(fused);
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    CHECK(fused.calls.size() >= ex.calls.size());
    CHECK(fuse_hints(fused, hints, "/n", issues) == fused);
  }
}
