// Command-line front end: run scenarios, compare modes, print oracle answers, check fixtures.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rapp/harness.hpp"

namespace {

using namespace rapp;

std::vector<int> scenario_list(const std::string& arg) {
  if (arg == "all") return {1, 2, 3, 4};
  try {
    std::size_t used = 0;
    const int id = std::stoi(arg, &used);
    if (used == arg.size() && id >= 1 && id <= 4) return {id};
  } catch (const std::exception&) {
  }
  throw UsageError("--scenario takes 1..4 or all, got '" + arg + "'");
}

std::vector<Mode> mode_list(const std::string& arg) {
  if (arg == "all") return {Mode::F5, Mode::SA, Mode::NR, Mode::NP, Mode::FCFS};
  try {
    return {mode_from_string(arg)};
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Fixtures fixtures_from(const std::string& dir) {
  return dir.empty() ? load_default_fixtures() : load_fixtures(dir);
}

void write_report(const std::vector<RunReport>& reports, const std::string& format, const std::string& path) {
  if (path.empty() || path == "-") emit_report(reports, format, std::cout);
  else emit_report(reports, format, std::filesystem::path(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict-aware rApp policy orchestration"};
  app.require_subcommand(1);

  std::string fixture_dir;
  app.add_option("--fixtures", fixture_dir, "Fixture directory (default: bundled fixtures)");

  // run
  auto* run = app.add_subcommand("run", "Run scenarios under one or more modes");
  std::string scenario = "all", mode = "f5", transport = "mock-oracle", report, format = "json", memory_dir;
  std::uint64_t seed = 0;
  int max_iters = kMaxIterations;
  std::size_t analogues = 3;
  run->add_option("--scenario", scenario, "1..4 or all")->capture_default_str();
  run->add_option("--mode", mode, "f5, sa, nr, np, fcfs or all")->capture_default_str();
  run->add_option("--transport", transport, "http, mock-oracle or mock-noisy")->capture_default_str();
  run->add_option("--seed", seed, "Seed for noisy mocks")->capture_default_str();
  run->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::Range(1, kMaxIterations))->capture_default_str();
  run->add_option("--analogues", analogues, "Memory analogues per prompt")->capture_default_str();
  run->add_option("--report", report, "Output path (stdout when omitted)");
  run->add_option("--format", format, "json or csv")->capture_default_str();
  run->add_option("--memory-dir", memory_dir, "Write each run's memory buffer here as JSON lines");

  // compare
  auto* compare = app.add_subcommand("compare", "Mean/min/max of run metrics per mode over a seed range");
  std::string cmp_scenario = "1", cmp_modes = "all", cmp_transport = "mock-noisy", cmp_format = "csv";
  std::uint64_t first_seed = 1;
  std::size_t seed_count = 20;
  compare->add_option("--scenario", cmp_scenario, "1..4 or all")->capture_default_str();
  compare->add_option("--mode", cmp_modes, "f5, sa, nr, np, fcfs or all")->capture_default_str();
  compare->add_option("--transport", cmp_transport, "mock-oracle or mock-noisy")->capture_default_str();
  compare->add_option("--first-seed", first_seed)->capture_default_str();
  compare->add_option("--seeds", seed_count, "Number of consecutive seeds")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--format", cmp_format, "json or csv")->capture_default_str();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Print reference pipelines and the maximum conflict-free subset");
  int oracle_scenario = 1;
  oracle->add_option("--scenario", oracle_scenario, "Scenario id")->required()->check(CLI::Range(1, 4));

  // fixtures validate
  auto* fixtures = app.add_subcommand("fixtures", "Fixture utilities");
  fixtures->require_subcommand(1);
  auto* validate = fixtures->add_subcommand("validate", "Run the fixture authoring gate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto scenarios = scenario_list(scenario);
      const auto modes = mode_list(mode);
      const auto kind = transport_from_string(transport);
      if (format != "json" && format != "csv") throw UsageError("--format takes json or csv");
      Harness h(fixtures_from(fixture_dir));
      if (!memory_dir.empty()) std::filesystem::create_directories(memory_dir);
      std::vector<RunReport> reports;
      for (int s : scenarios) {
        for (Mode m : modes) {
          RunOptions opts;
          opts.mode = m;
          opts.transport = kind;
          opts.seed = seed;
          opts.max_iterations = max_iters;
          opts.analogues = analogues;
          if (!memory_dir.empty())
            opts.memory_out = std::filesystem::path(memory_dir) /
                              ("s" + std::to_string(s) + "_" + to_string(m) + "_seed" + std::to_string(seed) + ".jsonl");
          reports.push_back(h.run(s, opts));
        }
      }
      write_report(reports, format, report);
    } else if (compare->parsed()) {
      const auto kind = transport_from_string(cmp_transport);
      Harness h(fixtures_from(fixture_dir));
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(first_seed + i);
      std::vector<ModeSummary> rows;
      for (int s : scenario_list(cmp_scenario)) {
        auto part = compare_modes(h, s, mode_list(cmp_modes), kind, seeds);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      emit_comparison(rows, cmp_format, std::cout);
    } else if (oracle->parsed()) {
      const auto fx = fixtures_from(fixture_dir);
      const auto sol = solve_scenario(fx, fx.scenario(oracle_scenario));
      nlohmann::ordered_json out;
      out["scenario"] = oracle_scenario;
      out["pre_deployed"] = fx.scenario(oracle_scenario).pre_deployed_intents;
      out["oracle"] = nlohmann::ordered_json::parse(Json(sol.oracle).dump());
      std::cout << out.dump(2) << "\n";
    } else if (validate->parsed()) {
      const auto problems = validate_fixtures(fixtures_from(fixture_dir));
      for (const auto& p : problems) std::cerr << "fixture problem: " << p << "\n";
      if (!problems.empty()) return 1;
      std::cout << "fixtures ok\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
