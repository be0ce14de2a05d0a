#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rapp/conflict.hpp"
#include "rapp/documents.hpp"
#include "rapp/memory.hpp"
#include "rapp/planner.hpp"
#include "rapp/prompts.hpp"
#include "rapp/retrieval.hpp"
#include "rapp/transport.hpp"

namespace rapp {

enum class Mode { F5, SA, NR, NP, FCFS };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);  // case-insensitive
bool uses_perception(Mode m);                  // F5, NR, FCFS
bool uses_refinement(Mode m);                  // F5, NP, FCFS

inline constexpr int kMaxIterations = 50;

struct RunContext {
  Mode mode = Mode::F5;
  std::vector<IntentId> batch;  // ascending
  DeploymentState deployed;     // pre-deployed pipelines
  int iteration = 0;
  int max_iterations = kMaxIterations;
  std::uint64_t seed = 0;
  std::size_t analogues_k = 3;
};

/// Shared collaborators of one run. The memory kernel is written only between agent rounds.
struct AgentEnv {
  const Registry& registry;
  const IntentCatalog& intents;
  const VendorCompatibilityMatrix& matrix;
  const PromptLibrary& prompts;
  const VectorStore* store = nullptr;  // no retrieval when null
  MemoryKernel& memory;
  ChatTransport& transport;

  ConflictContext conflict_context() const { return {registry, intents, matrix}; }
};

struct CallRecord {
  int iteration = 0;
  AgentRole role = AgentRole::Reasoning;
  IntentId intent = 0;  // 0 for the single-agent batch call
  int attempts = 0;     // 1, or 2 when a repair prompt was sent
  bool ok = false;
  std::vector<std::string> errors;
};

/// Per-intent view of the batch at the start of an iteration.
struct IntentView {
  const Intent* intent = nullptr;
  const Pipeline* current = nullptr;       // this intent's candidate from the previous iteration
  std::vector<const Pipeline*> peers;      // other intents' previous candidates
  std::vector<ScoredChunk> retrieved;
};

/// Agent calls. Each sends one prompt, and at most one repair prompt when the answer fails to
/// parse. A transport error or a second rejection yields nullopt; the call is logged in `log`.
std::optional<PerceptionDoc> run_perception(const RunContext& ctx, const IntentView& view, const AgentEnv& env,
                                            std::vector<CallRecord>& log);
std::optional<PolicyDoc> run_reasoning(const RunContext& ctx, const IntentView& view,
                                       const std::optional<PerceptionDoc>& perception,
                                       const std::vector<Analogue>& analogues, const AgentEnv& env,
                                       std::vector<CallRecord>& log);
std::optional<RefinementDoc> run_refinement(const RunContext& ctx, const IntentView& view, const PolicyDoc& candidate,
                                            const std::string& failure_summary, const AgentEnv& env,
                                            std::vector<CallRecord>& log);
/// Single combined prompt for the whole batch (mode SA).
std::optional<std::map<IntentId, PolicyDoc>> run_single_agent(const RunContext& ctx,
                                                              const std::vector<IntentView>& views,
                                                              const std::map<IntentId, std::vector<Analogue>>& analogues,
                                                              const AgentEnv& env, std::vector<CallRecord>& log);

struct ScoredSolution {
  std::map<IntentId, Pipeline> proposed;
  std::set<IntentId> deployed;
  SolutionScore score;
  int iteration = 0;
};

/// Candidate iff its score is at least the previous best's.
const ScoredSolution& enforce_monotonicity(const ScoredSolution& previous_best, const ScoredSolution& candidate);

/// FCFS admission: ascending intent id, each admitted only when it is valid against everything
/// already running and shares no xApp instance with it.
std::set<IntentId> fcfs_select(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                               const ConflictContext& ctx);

/// Highest-scoring deployable subset (correct pipelines first, then count).
std::set<IntentId> optimal_select(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                                  const ConflictContext& ctx, const std::map<IntentId, Pipeline>& truths);

struct BatchOutcome {
  std::vector<SolutionScore> candidate_scores;  // one per iteration
  std::vector<SolutionScore> best_scores;       // after monotonicity, one per iteration
  std::optional<ScoredSolution> best;
  std::vector<CallRecord> calls;
  int iterations_run = 0;
  std::optional<int> iterations_to_synthesis;
  std::optional<int> iterations_to_deployment;
  bool converged() const { return iterations_to_synthesis && iterations_to_deployment; }
};

/// The bounded loop: perception, reasoning, refinement per intent (as the mode dictates),
/// deployment selection, scoring, monotonicity, memory write. Stops once every pipeline equals its
/// reference and the correct deployed count reaches `objective`, or after max_iterations.
/// Memory must be cleared by the caller.
BatchOutcome orchestrate_batch(RunContext ctx, const AgentEnv& env, const std::map<IntentId, Pipeline>& truths,
                               int objective);

}  // namespace rapp
