#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "generators.hpp"
#include "rapp/conflict.hpp"
#include "rapp/harness.hpp"
#include "rapp/planner.hpp"

using namespace rapp;

namespace {

XAppProfile profile(const std::string& id, const std::string& dialect, std::set<std::string> params,
                    std::map<std::string, Direction> effects, Stage stage = Stage::Act) {
  XAppProfile x;
  x.id = id;
  x.name = id;
  x.vendor = dialect;
  x.dialect = dialect;
  x.capabilities = {"cap_" + id};
  x.controlled_params = std::move(params);
  x.kpi_effects = std::move(effects);
  x.stage = stage;
  return x;
}

struct World {
  Registry reg{{
      profile("pwr", "std", {"tx_power"}, {{"energy", -1}, {"coverage", -1}}),
      profile("ul", "std", {"tx_power", "snr"}, {{"interference", -1}}),
      profile("tsa", "ts_a", {"ho_offset"}, {{"throughput", 1}}, Stage::Decide),
      profile("tsb", "ts_b", {"ho_offset"}, {{"throughput", 1}}, Stage::Decide),
      profile("cov", "std", {"tilt"}, {{"coverage", 1}}),
      profile("det", "std", {}, {}, Stage::Sense),
  }};
  IntentCatalog intents{{1, {1, "save energy", {{"energy", -1}}, {}, {}}},
                        {2, {2, "more coverage", {{"coverage", 1}}, {}, {}}},
                        {3, {3, "more throughput", {{"throughput", 1}}, {}, {}}},
                        {4, {4, "less energy use", {{"energy", 1}}, {}, {}}}};
  VendorCompatibilityMatrix m;
  World() { m.add("ts_b", "ts_a"); }
  ConflictContext ctx() const { return {reg, intents, m}; }
};

Pipeline pipe(IntentId id, std::vector<std::pair<std::string, Directive>> nodes, std::set<Edge> edges = {}) {
  Pipeline p;
  p.intent_id = id;
  for (auto& [x, d] : nodes) p.nodes.push_back({x, d});
  p.edges = std::move(edges);
  return p;
}

}  // namespace

TEST(Actuator, DirectiveMismatchOnSharedXApp) {
  auto a = pipe(1, {{"pwr", {{"tx_power", "low"}}}});
  auto b = pipe(2, {{"pwr", {{"tx_power", "High"}}}});
  auto rs = detect_actuator_contention(a, b);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].kind, ConflictKind::ActuatorContention);
  EXPECT_EQ(rs[0].subject, "pwr");
  EXPECT_EQ(rs[0].participants, (std::vector<Participant>{{1, "pwr"}, {2, "pwr"}}));
}

TEST(Actuator, NormalizedEqualDirectivesDoNotConflict) {
  auto a = pipe(1, {{"pwr", {{"tx_power", "low"}}}});
  auto b = pipe(2, {{"pwr", {{" TX_POWER", "Low "}}}});
  EXPECT_TRUE(detect_actuator_contention(a, b).empty());
}

TEST(Parameter, DifferentWritersOfOneParam) {
  World w;
  auto a = pipe(1, {{"pwr", {}}});
  auto b = pipe(2, {{"ul", {}}});
  auto rs = detect_parameter_coupling(a, b, w.reg);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].subject, "tx_power");
  // Same xApp on both sides is actuator territory, not coupling.
  EXPECT_TRUE(detect_parameter_coupling(a, pipe(2, {{"pwr", {}}}), w.reg).empty());
}

TEST(Parameter, InternalNeedsOrderingPath) {
  World w;
  auto loose = pipe(1, {{"pwr", {}}, {"ul", {}}});
  auto rs = detect_internal_coupling(loose, w.reg);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].participants, (std::vector<Participant>{{1, "pwr"}, {1, "ul"}}));
  auto ordered = pipe(1, {{"pwr", {}}, {"ul", {}}}, {{"pwr", "ul"}});
  EXPECT_TRUE(detect_internal_coupling(ordered, w.reg).empty());
}

TEST(Objective, OppositeTargets) {
  World w;
  auto a = pipe(1, {{"det", {}}});
  auto b = pipe(4, {{"det", {}}});
  auto rs = detect_objective_interference(a, w.intents.at(1), b, w.intents.at(4), w.reg);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].subject, "energy");
  // Neither side has an xApp touching energy: whole-pipeline participants.
  EXPECT_EQ(rs[0].participants, (std::vector<Participant>{{1, "*"}, {4, "*"}}));
}

TEST(Objective, EffectAgainstOtherTarget) {
  World w;
  auto a = pipe(1, {{"pwr", {}}});  // lowers coverage
  auto b = pipe(2, {{"cov", {}}});  // intent 2 wants coverage up
  auto rs = detect_objective_interference(a, w.intents.at(1), b, w.intents.at(2), w.reg);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].subject, "coverage");
  EXPECT_EQ(rs[0].participants, (std::vector<Participant>{{1, "pwr"}, {2, "cov"}}));
}

TEST(Vendor, IncompatibleDialectsSharingParam) {
  World w;
  auto a = pipe(3, {{"tsa", {}}});
  auto b = pipe(2, {{"tsb", {}}});
  auto rs = detect_vendor_conflicts(a, b, w.reg, w.m);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].subject, "ts_a|ts_b");
}

TEST(Vendor, IntraPipelineEdge) {
  World w;
  auto p = pipe(3, {{"tsa", {}}, {"tsb", {}}}, {{"tsa", "tsb"}});
  auto rs = detect_vendor_conflicts(p, w.reg, w.m);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].participants, (std::vector<Participant>{{3, "tsa"}, {3, "tsb"}}));
}

TEST(Validity, EmptyOthersOnlyInternal) {
  World w;
  auto ok = pipe(1, {{"pwr", {}}});
  EXPECT_TRUE(validity(ok, {}, w.ctx()).valid);
  auto bad = pipe(1, {{"pwr", {}}, {"ul", {}}});
  EXPECT_FALSE(validity(bad, {}, w.ctx()).valid);
  EXPECT_FALSE(validity(ok, {pipe(2, {{"ul", {}}})}, w.ctx()).valid);
}

TEST(Records, CanonicalOrderAndJson) {
  ConflictRecord a{ConflictKind::VendorInterop, {{1, "x"}}, "s", "e1"};
  ConflictRecord b{ConflictKind::ActuatorContention, {{1, "x"}}, "z", "e2"};
  std::vector<ConflictRecord> v{a, b, a};
  canonicalize(v);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].kind, ConflictKind::ActuatorContention);
  EXPECT_EQ(v[1], v[2]);
  Json j = a;
  EXPECT_EQ(j.get<ConflictRecord>(), a);
  EXPECT_EQ(j.get<ConflictRecord>().explanation, "e1");
  for (auto k : {ConflictKind::ActuatorContention, ConflictKind::ParameterCoupling, ConflictKind::ObjectiveInterference,
                 ConflictKind::VendorInterop})
    EXPECT_EQ(conflict_kind_from_string(to_string(k)), k);
}

TEST(Graph, SelfLoopsAndPairs) {
  World w;
  std::vector<Pipeline> cands{pipe(1, {{"pwr", {}}, {"ul", {}}}), pipe(2, {{"cov", {}}})};
  DeploymentState pre{{pipe(3, {{"tsa", {}}})}};
  auto g = build_conflict_graph(cands, pre, w.ctx());
  EXPECT_EQ(g.vertices, (std::set<IntentId>{1, 2, 3}));
  EXPECT_FALSE(g.between(1, 1).empty());
  EXPECT_FALSE(g.between(2, 1).empty());
  EXPECT_TRUE(g.between(2, 3).empty());
  EXPECT_EQ(g.touching(2).size(), g.between(1, 2).size());
}

TEST(Graph, DuplicateRefRejected) {
  World w;
  std::vector<Pipeline> cands{pipe(1, {{"pwr", {}}})};
  DeploymentState pre{{pipe(1, {{"cov", {}}})}};
  EXPECT_THROW(build_conflict_graph(cands, pre, w.ctx()), Error);
}

TEST(Graph, ParallelMatchesSerialReference) {
  testkit::Rng rng(5);
  for (int t = 0; t < 60; ++t) {
    auto w = testkit::random_world(rng, 6, 6);
    std::vector<Pipeline> cands;
    DeploymentState pre;
    for (IntentId id = 1; id <= 6; ++id) {
      auto p = testkit::random_pipeline(rng, w.registry, id, 3);
      (id <= 4 ? cands : pre.active).push_back(p);
    }
    ConflictContext ctx{w.registry, w.intents, w.matrix};
    EXPECT_EQ(build_conflict_graph(cands, pre, ctx), reference::build_conflict_graph(cands, pre, ctx));
  }
}

// Each detector against the subject-enumerating restatement in support/brute_force.
TEST(ConflictProperty, DetectorsMatchBruteForce) {
  testkit::Rng rng(2024);
  for (int t = 0; t < 150; ++t) {
    auto w = testkit::random_world(rng, 6, 2);
    auto a = testkit::random_pipeline(rng, w.registry, 1, 3);
    auto b = testkit::random_pipeline(rng, w.registry, 2, 3);
    const auto& r = w.registry;
    EXPECT_EQ(detect_actuator_contention(a, b), testkit::brute::actuator(a, b, r));
    EXPECT_EQ(detect_parameter_coupling(a, b, r), testkit::brute::parameter(a, b, r));
    EXPECT_EQ(detect_objective_interference(a, w.intents.at(1), b, w.intents.at(2), r),
              testkit::brute::objective(a, w.intents.at(1), b, w.intents.at(2), r));
    EXPECT_EQ(detect_vendor_conflicts(a, b, r, w.matrix), testkit::brute::vendor(a, b, r, w.matrix));
    EXPECT_EQ(detect_internal_coupling(a, r), testkit::brute::internal_coupling(a, r));
    EXPECT_EQ(detect_vendor_conflicts(a, r, w.matrix), testkit::brute::intra_vendor(a, r, w.matrix));
  }
}

TEST(ConflictProperty, PairConflictsSymmetricInExistence) {
  testkit::Rng rng(99);
  for (int t = 0; t < 150; ++t) {
    auto w = testkit::random_world(rng, 6, 2);
    auto a = testkit::random_pipeline(rng, w.registry, 1, 3);
    auto b = testkit::random_pipeline(rng, w.registry, 2, 3);
    ConflictContext ctx{w.registry, w.intents, w.matrix};
    auto ab = pair_conflicts(a, b, ctx);
    auto ba = pair_conflicts(b, a, ctx);
    EXPECT_EQ(ab, ba);
  }
}

TEST(Fixtures, UrllcAndEnergyIntentsShareTxPowerWriters) {
  auto fx = load_default_fixtures();
  auto p2 = synthesize_ground_truth(fx.intents.at(2), fx.registry, fx.matrix);
  Pipeline ul;
  ul.intent_id = 9;
  ul.nodes.push_back({"UplinkPowerControlAgent", {}});
  IntentCatalog intents = fx.intents;
  intents[9] = Intent{9, "uplink", {{"ul_interference", -1}}, {"uplink_power_control"}, {}};
  ConflictContext ctx9{fx.registry, intents, fx.matrix};
  auto rs = detect_parameter_coupling(p2, ul, fx.registry);
  ASSERT_FALSE(rs.empty());
  EXPECT_EQ(rs[0].subject, "tx_power");
  EXPECT_FALSE(validity(p2, {ul}, ctx9).valid);
}
