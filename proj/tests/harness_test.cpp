#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rapp/harness.hpp"

using namespace rapp;
namespace fs = std::filesystem;

namespace {

const Harness& harness() {
  static const Harness h(load_default_fixtures());
  return h;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Copy of the default fixture directory that a test may damage.
fs::path scratch_fixtures(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("rapp_fx_" + name);
  fs::remove_all(dir);
  fs::copy(data_dir() / "fixtures" / "default", dir, fs::copy_options::recursive);
  return dir;
}

}  // namespace

TEST(Fixtures, Counts) {
  const auto& fx = harness().fixtures();
  EXPECT_EQ(fx.registry.size(), kExpectedXApps);
  EXPECT_EQ(fx.intents.size(), kExpectedIntents);
  EXPECT_EQ(fx.scenarios.size(), kExpectedScenarios);
  EXPECT_FALSE(fx.corpus.empty());
  EXPECT_TRUE(fx.matrix.incompatible("ts_b", "ts_a"));
  EXPECT_THROW(fx.scenario(9), Error);
}

TEST(Fixtures, PassAuthoringGate) {
  auto problems = validate_fixtures(harness().fixtures());
  EXPECT_TRUE(problems.empty()) << problems.front();
}

TEST(Fixtures, MissingProfileNamed) {
  auto dir = scratch_fixtures("short");
  auto xs = Json::parse(slurp(dir / "xapps.json"));
  xs.erase(xs.begin());
  std::ofstream(dir / "xapps.json") << xs.dump();
  try {
    load_fixtures(dir);
    FAIL() << "expected FixtureError";
  } catch (const FixtureError& e) {
    EXPECT_STREQ(e.what(), "xapps.json: expected 14 profiles, found 13");
  }
  fs::remove_all(dir);
}

TEST(Fixtures, BadFieldNamed) {
  auto dir = scratch_fixtures("badstage");
  auto xs = Json::parse(slurp(dir / "xapps.json"));
  xs[2]["stage"] = "observe";
  std::ofstream(dir / "xapps.json") << xs.dump();
  try {
    load_fixtures(dir);
    FAIL() << "expected FixtureError";
  } catch (const FixtureError& e) {
    EXPECT_NE(std::string(e.what()).find("xapps.json[2]"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
  EXPECT_THROW(load_fixtures(fs::temp_directory_path() / "rapp_fx_absent"), FixtureError);
}

TEST(Scenarios, Compositions) {
  const auto& h = harness();
  EXPECT_TRUE(h.solution(4).pre.active.empty());
  EXPECT_EQ(h.solution(4).oracle.objective_value, 7);
  EXPECT_EQ(h.solution(3).pre.active.size(), 2u);
  EXPECT_EQ(h.solution(3).oracle.max_subset, (std::set<IntentId>{2, 4, 5, 6}));
}

TEST(Transport, Names) {
  for (auto k : {TransportKind::Http, TransportKind::MockOracle, TransportKind::MockNoisy})
    EXPECT_EQ(transport_from_string(to_string(k)), k);
  EXPECT_THROW(transport_from_string("carrier-pigeon"), UsageError);
  auto t = make_transport(TransportKind::MockNoisy, harness().world(), 5);
  EXPECT_EQ(t->descriptor(), "mock-noisy(seed=5)");
}

TEST(Run, FcfsFallsShortWhereConflictsAreDesigned) {
  RunOptions opts;
  opts.mode = Mode::FCFS;
  auto r3 = harness().run(3, opts);
  EXPECT_LT(r3.deployment_success, 1.0);
  EXPECT_FALSE(r3.converged);
  EXPECT_EQ(r3.iterations_to_deployment, kMaxIterations);
  EXPECT_DOUBLE_EQ(r3.generation_accuracy, 1.0);
}

TEST(Run, ReportsAndMemoryFilesByteIdentical) {
  auto dir = fs::temp_directory_path() / "rapp_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunOptions opts;
  opts.transport = TransportKind::MockNoisy;
  opts.seed = 11;
  opts.mode = Mode::NR;
  opts.memory_out = dir / "a.jsonl";
  auto a = harness().run(2, opts);
  opts.memory_out = dir / "b.jsonl";
  auto b = harness().run(2, opts);
  std::ostringstream ja, jb;
  emit_report({a}, "json", ja);
  emit_report({b}, "json", jb);
  EXPECT_EQ(ja.str(), jb.str());
  EXPECT_FALSE(slurp(dir / "a.jsonl").empty());
  EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
  fs::remove_all(dir);
}

TEST(Report, JsonAndCsv) {
  RunReport r{2, "F5", 1.0, 0.5, 3, 50, false, 9, "mock-noisy(seed=9)"};
  std::ostringstream js;
  emit_report({r}, "json", js);
  auto j = Json::parse(js.str());
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["mode"], "F5");
  EXPECT_EQ(j[0]["iterations_to_deployment"], 50);
  EXPECT_EQ(j[0]["converged"], false);

  std::ostringstream cs;
  emit_report({r}, "csv", cs);
  EXPECT_EQ(cs.str(), std::string(kCsvHeader) + "\n2,F5,1.0,0.5,3,50,false,9,mock-noisy(seed=9)\n");

  std::ostringstream bad;
  EXPECT_THROW(emit_report({r}, "xml", bad), UsageError);
}

TEST(Compare, SummaryOverSeeds) {
  std::vector<RunReport> runs;
  auto rows = compare_modes(harness(), 1, {Mode::F5, Mode::SA}, TransportKind::MockNoisy, {1, 2, 3}, &runs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(runs.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.runs, 3u);
    EXPECT_LE(row.iterations_to_deployment.min, row.iterations_to_deployment.mean);
    EXPECT_LE(row.iterations_to_deployment.mean, row.iterations_to_deployment.max);
  }
  std::ostringstream out;
  emit_comparison(rows, "csv", out);
  EXPECT_NE(out.str().find("F5"), std::string::npos);
}
