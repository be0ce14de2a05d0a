#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rapp/agents.hpp"
#include "rapp/mocks.hpp"
#include "rapp/planner.hpp"
#include "rapp/prompts.hpp"
#include "rapp/retrieval.hpp"

namespace rapp {

/// Fixture file missing, malformed or violating a count/shape rule. Message names file and field.
class FixtureError : public Error {
public:
  using Error::Error;
};

/// Bad command-line style input (unknown format, mode, transport).
class UsageError : public Error {
public:
  using Error::Error;
};

struct ScenarioSpec {
  int id = 0;
  std::vector<IntentId> new_intents;
  std::vector<IntentId> pre_deployed_intents;
};

struct Fixtures {
  Registry registry;
  IntentCatalog intents;
  std::vector<ScenarioSpec> scenarios;
  VendorCompatibilityMatrix matrix;
  std::map<std::string, std::string> corpus;  // file name -> text

  const ScenarioSpec& scenario(int id) const;
};

inline constexpr std::size_t kExpectedXApps = 14;
inline constexpr std::size_t kExpectedIntents = 7;
inline constexpr std::size_t kExpectedScenarios = 4;

/// Data root: $RAPP_DATA_DIR, else the source tree's data/ directory.
std::filesystem::path data_dir();

/// Reads xapps.json, intents.json, kpis.json, scenarios.json, vendor_matrix.json and corpus/.
Fixtures load_fixtures(const std::filesystem::path& dir);
Fixtures load_default_fixtures();

/// Reference pipelines for every intent the scenario touches, the pre-deployed state and the
/// oracle's maximum conflict-free subset of the new intents.
struct ScenarioSolution {
  std::map<IntentId, Pipeline> truths;
  DeploymentState pre;
  OracleResult oracle;
};

ScenarioSolution solve_scenario(const Fixtures& fx, const ScenarioSpec& spec);

/// Authoring gate: roster, intent texts, scenario compositions, and per scenario that the
/// reference pipelines (new and pre-deployed) are pairwise valid with objective = |new|.
/// Returns the problems found; empty means the fixtures pass.
std::vector<std::string> validate_fixtures(const Fixtures& fx);

enum class TransportKind { Http, MockOracle, MockNoisy };
TransportKind transport_from_string(const std::string& s);  // http | mock-oracle | mock-noisy
std::string to_string(TransportKind k);

std::unique_ptr<ChatTransport> make_transport(TransportKind kind, std::shared_ptr<const MockWorld> world,
                                              std::uint64_t seed);

struct RunOptions {
  Mode mode = Mode::F5;
  TransportKind transport = TransportKind::MockOracle;
  std::uint64_t seed = 0;
  int max_iterations = kMaxIterations;
  std::size_t analogues = 3;
  std::optional<std::filesystem::path> memory_out;  // JSON-lines dump of the run's buffer
};

struct RunReport {
  int scenario = 0;
  std::string mode;
  double generation_accuracy = 0.0;
  double deployment_success = 0.0;
  int iterations_to_synthesis = 0;   // max_iterations when never reached
  int iterations_to_deployment = 0;  // max_iterations when never reached
  bool converged = false;
  std::uint64_t seed = 0;
  std::string transport;
  bool operator==(const RunReport&) const = default;
};

/// Owns fixtures, the knowledge store, prompt templates and the mock world. Runs are independent
/// and may execute on different threads.
class Harness {
public:
  explicit Harness(Fixtures fx, std::shared_ptr<Embedder> embedder = std::make_shared<HashedTrigramEmbedder>(),
                   std::optional<PromptLibrary> prompts = std::nullopt);

  const Fixtures& fixtures() const { return fx_; }
  const VectorStore& store() const { return store_; }
  const PromptLibrary& prompts() const { return prompts_; }
  std::shared_ptr<const MockWorld> world() const { return world_; }
  const ScenarioSolution& solution(int scenario) const;

  /// Seeds the deployment with pre-deployed references, starts from an empty memory, runs the loop.
  /// `transport` overrides the one named in `opts`; `trace` receives the raw loop outcome.
  RunReport run(int scenario, const RunOptions& opts, ChatTransport* transport = nullptr,
                BatchOutcome* trace = nullptr) const;

private:
  Fixtures fx_;
  std::shared_ptr<Embedder> embedder_;
  VectorStore store_;
  PromptLibrary prompts_;
  std::shared_ptr<const MockWorld> world_;
  std::map<int, ScenarioSolution> solutions_;
};

struct MetricSpread {
  double mean = 0.0, min = 0.0, max = 0.0;
};

struct ModeSummary {
  int scenario = 0;
  std::string mode;
  std::size_t runs = 0;
  MetricSpread generation_accuracy, deployment_success, iterations_to_synthesis, iterations_to_deployment;
  double converged_fraction = 0.0;
};

std::vector<ModeSummary> compare_modes(const Harness& h, int scenario, const std::vector<Mode>& modes,
                                       TransportKind transport, const std::vector<std::uint64_t>& seeds,
                                       std::vector<RunReport>* runs = nullptr);

inline constexpr const char* kCsvHeader =
    "scenario,mode,generation_accuracy,deployment_success,iterations_to_synthesis,iterations_to_deployment,"
    "converged,seed,transport";

/// JSON array of reports or CSV with kCsvHeader; other formats raise UsageError.
void emit_report(const std::vector<RunReport>& reports, const std::string& format, std::ostream& out);
void emit_report(const std::vector<RunReport>& reports, const std::string& format, const std::filesystem::path& file);
void emit_comparison(const std::vector<ModeSummary>& rows, const std::string& format, std::ostream& out);

}  // namespace rapp
