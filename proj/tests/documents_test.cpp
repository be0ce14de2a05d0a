#include <gtest/gtest.h>

#include "generators.hpp"
#include "rapp/documents.hpp"
#include "rapp/harness.hpp"

using namespace rapp;

namespace {

const Fixtures& fx() {
  static const Fixtures f = load_default_fixtures();
  return f;
}

Json policy_json() {
  return Json::parse(R"({
    "intent_id": 2,
    "selected_xapps": [{"xapp_id": "PowerSavingController", "directive": {"tx_power": "energy_consumption-"}}],
    "edges": [],
    "deployment_conditions": {"activate_when": [{"metric": "hour", "op": ">=", "value": 22}]}
  })");
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(PolicyDoc, ParsesValidPolicy) {
  auto p = parse_policy(policy_json(), fx().registry, 2);
  ASSERT_TRUE(p.ok()) << p.errors.front();
  EXPECT_EQ(p.value->selected_xapps.size(), 1u);
  EXPECT_EQ(p.value->deployment_conditions.activate_when[0].value, "22");
}

TEST(PolicyDoc, StrictErrors) {
  auto j = policy_json();
  j["extra"] = 1;
  EXPECT_TRUE(mentions(parse_policy(j, fx().registry, 2).errors, "extra"));

  j = policy_json();
  j["selected_xapps"][0]["xapp_id"] = "Nope";
  EXPECT_TRUE(mentions(parse_policy(j, fx().registry, 2).errors, "Nope"));

  EXPECT_FALSE(parse_policy(policy_json(), fx().registry, 3).ok());

  j = policy_json();
  j["selected_xapps"][0]["directive"]["tx_power"] = 5;
  EXPECT_FALSE(parse_policy(j, fx().registry, 2).ok());

  j = policy_json();
  j["deployment_conditions"]["activate_when"][0]["op"] = "~=";
  EXPECT_FALSE(parse_policy(j, fx().registry, 2).ok());

  j = policy_json();
  j.erase("edges");
  EXPECT_FALSE(parse_policy(j, fx().registry, 2).ok());
}

TEST(PolicyDoc, StructuralProblemsAreNotParseErrors) {
  auto j = policy_json();
  j["selected_xapps"].push_back(j["selected_xapps"][0]);
  j["edges"] = Json::array({Json::array({"PowerSavingController", "PowerSavingController"})});
  EXPECT_TRUE(parse_policy(j, fx().registry, 2).ok());
}

TEST(PolicyDoc, FencedTextAccepted) {
  auto text = "Here you go:\n```json\n" + policy_json().dump(2) + "\n```\n";
  EXPECT_TRUE(parse_policy(text, fx().registry, 2).ok());
  EXPECT_FALSE(parse_policy(std::string("{\"intent_id\": 2,"), fx().registry, 2).ok());
}

TEST(PolicyDoc, PipelineRoundTripThroughText) {
  testkit::Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    auto reg = testkit::random_registry(rng, 6);
    auto p = testkit::random_pipeline(rng, reg, t + 1, 3);
    testkit::randomize_conditions(rng, p);
    auto parsed = parse_policy(to_json(to_policy_doc(p)).dump(), reg, p.intent_id);
    ASSERT_TRUE(parsed.ok()) << parsed.errors.front();
    EXPECT_EQ(to_pipeline(*parsed.value), p);
  }
}

TEST(PerceptionDoc, RoundTripAndGrouping) {
  ConflictGraph g;
  g.vertices = {1, 2};
  g.edges[{1, 2}] = {{ConflictKind::ActuatorContention, {{1, "x"}, {2, "x"}}, "x", "why"},
                     {ConflictKind::VendorInterop, {{1, "a"}, {2, "b"}}, "d1|d2", "why"}};
  auto doc = perception_from_graph(g, "two issues");
  auto j = to_json(doc);
  EXPECT_EQ(j["conflicts"]["actuator"].size(), 1u);
  EXPECT_EQ(j["conflicts"]["parameter"].size(), 0u);
  EXPECT_EQ(j["conflicts"]["vendor"].size(), 1u);
  auto back = parse_perception(j.dump());
  ASSERT_TRUE(back.ok()) << back.errors.front();
  EXPECT_EQ(*back.value, doc);
}

TEST(PerceptionDoc, RejectsUnknownCategory) {
  auto j = to_json(PerceptionDoc{});
  j["conflicts"]["timing"] = Json::array();
  EXPECT_FALSE(parse_perception(j.dump()).ok());
  EXPECT_FALSE(parse_perception("[]").ok());
}

TEST(RefinementDoc, EditsIffChanged) {
  auto input = *parse_policy(policy_json(), fx().registry, 2).value;
  auto revised = input;
  revised.selected_xapps.push_back({"WirelessAnomalyDetector", {}});

  RefinementDoc same{input, {}};
  EXPECT_TRUE(parse_refinement(to_json(same).dump(), fx().registry, input).ok());

  RefinementDoc silent{revised, {}};
  EXPECT_FALSE(parse_refinement(to_json(silent).dump(), fx().registry, input).ok());

  RefinementDoc noisy{input, {{EditKind::DropSuperfluous, "nothing"}}};
  EXPECT_FALSE(parse_refinement(to_json(noisy).dump(), fx().registry, input).ok());

  RefinementDoc good{revised, {{EditKind::ReplaceXApp, "because"}}};
  auto parsed = parse_refinement(to_json(good).dump(), fx().registry, input);
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(*parsed.value, good);

  auto j = to_json(good);
  j["edits"][0]["kind"] = "rewrite_everything";
  EXPECT_FALSE(parse_refinement(j.dump(), fx().registry, input).ok());
}

TEST(EditKind, StringRoundTrip) {
  for (auto k : {EditKind::RemoveDuplicate, EditKind::DropSuperfluous, EditKind::ReorderStage, EditKind::ReplaceXApp,
                 EditKind::AdjustConditions})
    EXPECT_EQ(edit_kind_from_string(to_string(k)), k);
  EXPECT_EQ(to_string(EditKind::RemoveDuplicate), "remove_duplicate");
  EXPECT_FALSE(edit_kind_from_string("shuffle").has_value());
}

TEST(SingleAgentDoc, OnePolicyPerIntent) {
  auto p2 = policy_json();
  Json doc = {{"policies", Json::array({p2})}};
  auto ok = parse_single_agent(doc.dump(), fx().registry, {2});
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(ok.value->count(2), 1u);
  EXPECT_FALSE(parse_single_agent(doc.dump(), fx().registry, {2, 3}).ok());
  doc["policies"].push_back(p2);
  EXPECT_FALSE(parse_single_agent(doc.dump(), fx().registry, {2}).ok());
}
