#include <gtest/gtest.h>

#include "generators.hpp"
#include "rapp/domain.hpp"

using namespace rapp;

namespace {

XAppProfile profile(const std::string& id, Stage stage, std::set<std::string> params = {}) {
  XAppProfile x;
  x.id = id;
  x.name = id;
  x.vendor = "v";
  x.dialect = "d";
  x.capabilities = {"cap_" + id};
  x.controlled_params = std::move(params);
  x.stage = stage;
  return x;
}

Registry tiny() {
  return Registry({profile("S", Stage::Sense), profile("D", Stage::Decide, {"q"}), profile("A", Stage::Act, {"q"})});
}

Pipeline chain(std::vector<std::string> ids) {
  Pipeline p;
  p.intent_id = 1;
  for (auto& id : ids) p.nodes.push_back({id, {}});
  for (std::size_t i = 1; i < ids.size(); ++i) p.edges.insert({ids[i - 1], ids[i]});
  return p;
}

}  // namespace

TEST(Registry, LookupAndOrdering) {
  Registry r({profile("b", Stage::Act), profile("a", Stage::Sense)});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.profiles()[0].id, "a");
  EXPECT_TRUE(r.contains("b"));
  EXPECT_EQ(r.find("zz"), nullptr);
  EXPECT_THROW(r.at("zz"), Error);
}

TEST(Registry, DuplicateIdRejected) {
  EXPECT_THROW(Registry({profile("a", Stage::Act), profile("a", Stage::Sense)}), Error);
}

TEST(Stage, StringRoundTrip) {
  for (Stage s : {Stage::Sense, Stage::Decide, Stage::Act}) EXPECT_EQ(stage_from_string(to_string(s)), s);
  EXPECT_THROW(stage_from_string("observe"), Error);
}

TEST(Structure, ValidChain) {
  auto r = validate_pipeline_structure(chain({"S", "D", "A"}), tiny());
  EXPECT_TRUE(r.ok());
}

TEST(Structure, CollectsEveryViolation) {
  Pipeline p = chain({"A", "D", "D", "ghost"});
  p.edges.insert({"D", "nowhere"});
  auto r = validate_pipeline_structure(p, tiny());
  EXPECT_TRUE(r.has(ViolationKind::UnknownXApp));
  EXPECT_TRUE(r.has(ViolationKind::DuplicateNode));
  EXPECT_TRUE(r.has(ViolationKind::DanglingEdge));
  EXPECT_TRUE(r.has(ViolationKind::StageOrder));  // A(act) -> D(decide)
}

TEST(Structure, EmptyAndCycle) {
  EXPECT_TRUE(validate_pipeline_structure(Pipeline{}, tiny()).has(ViolationKind::EmptyNodeSet));
  Pipeline p = chain({"D", "A"});
  p.edges.insert({"A", "D"});
  auto r = validate_pipeline_structure(p, tiny());
  EXPECT_TRUE(r.has(ViolationKind::Cycle));
  EXPECT_THROW(topological_order(p), Error);
}

TEST(Topology, AscendingIdTieBreak) {
  Pipeline p;
  p.nodes = {{"c", {}}, {"a", {}}, {"b", {}}};
  p.edges = {{"c", "b"}};
  EXPECT_EQ(topological_order(p), (std::vector<XAppId>{"a", "c", "b"}));
  EXPECT_THROW(topological_order(Pipeline{}), Error);
}

TEST(Topology, HasPathNeedsAtLeastOneEdge) {
  Pipeline p = chain({"S", "D", "A"});
  EXPECT_TRUE(has_path(p, "S", "A"));
  EXPECT_FALSE(has_path(p, "A", "S"));
  EXPECT_FALSE(has_path(p, "S", "S"));
}

TEST(Topology, RandomOrdersRespectEdges) {
  testkit::Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    auto reg = testkit::random_registry(rng, 6);
    auto p = testkit::random_pipeline(rng, reg, 1, 6);
    ASSERT_TRUE(validate_pipeline_structure(p, reg).ok());
    auto order = topological_order(p);
    ASSERT_EQ(order.size(), p.nodes.size());
    std::map<XAppId, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [a, b] : p.edges) EXPECT_LT(pos[a], pos[b]);
  }
}

TEST(Directive, NormalizeTrimsAndLowercases) {
  EXPECT_EQ(normalize_directive({{" TX_Power ", "  Low\t"}}), (Directive{{"tx_power", "low"}}));
}

TEST(PipelineEquality, IgnoresOrderCaseAndConditions) {
  Pipeline p = chain({"S", "D"});
  p.nodes[1].directive = {{"q", "Up"}};
  Pipeline q;
  q.intent_id = 1;
  q.nodes = {{"D", {{"q", " up "}}}, {"S", {}}};
  q.edges = p.edges;
  q.deployment_conditions.activate_when.push_back({"hour", ">", "22"});
  EXPECT_TRUE(pipelines_equal(p, q));
  EXPECT_FALSE(p == q);
}

TEST(PipelineEquality, DetectsDifferences) {
  Pipeline p = chain({"S", "D"});
  Pipeline edges = p;
  edges.edges.clear();
  EXPECT_FALSE(pipelines_equal(p, edges));
  Pipeline dup = p;
  dup.nodes.push_back({"D", {}});
  EXPECT_FALSE(pipelines_equal(p, dup));
  Pipeline directive = p;
  directive.nodes[1].directive = {{"q", "down"}};
  EXPECT_FALSE(pipelines_equal(p, directive));
}

TEST(Json, PipelineRoundTrip) {
  testkit::Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    auto reg = testkit::random_registry(rng, 6);
    auto p = testkit::random_pipeline(rng, reg, t + 1, 4);
    testkit::randomize_conditions(rng, p);
    Json j = p;
    EXPECT_EQ(Json::parse(j.dump()).get<Pipeline>(), p);
  }
}

TEST(Json, ProfileAndIntentRoundTrip) {
  auto x = profile("D", Stage::Decide, {"q", "r"});
  x.kpi_effects = {{"latency", -1}};
  x.interfaces = {"E2"};
  Json jx = x;
  EXPECT_EQ(jx.get<XAppProfile>(), x);

  Intent i{4, "text", {{"sinr", 1}}, {"beamforming"}, {"D"}};
  Json ji = i;
  EXPECT_EQ(ji.get<Intent>(), i);
}

TEST(Conditions, SchemaProblems) {
  EXPECT_TRUE(check_conditions_schema(Json{{"activate_when", Json::array()}}).empty());
  EXPECT_FALSE(check_conditions_schema(Json::array()).empty());
  EXPECT_FALSE(check_conditions_schema(Json{{"activate_when", Json::array()}, {"extra", 1}}).empty());
  Json bad_op = {{"activate_when", {{{"metric", "hour"}, {"op", "~"}, {"value", 3}}}}};
  EXPECT_FALSE(check_conditions_schema(bad_op).empty());
  Json bad_window = {{"activate_when", Json::array()}, {"time_window", {{"start", "22:00"}}}};
  EXPECT_FALSE(check_conditions_schema(bad_window).empty());
}

TEST(Conditions, NumericValuesStoredAsText) {
  Json j = {{"activate_when", {{{"metric", "cell_load"}, {"op", "<"}, {"value", 30}}}}};
  auto c = j.get<DeploymentConditions>();
  ASSERT_EQ(c.activate_when.size(), 1u);
  EXPECT_EQ(c.activate_when[0].value, "30");
}
