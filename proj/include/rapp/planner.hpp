#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "rapp/conflict.hpp"
#include "rapp/domain.hpp"

namespace rapp {

/// Lexicographic solution quality. Higher is better, compared field by field.
struct SolutionScore {
  std::int64_t correct_deployed = 0;
  std::int64_t deployed = 0;
  std::int64_t neg_conflicts = 0;
  std::int64_t neg_total_nodes = 0;

  auto operator<=>(const SolutionScore&) const = default;
};

struct OracleResult {
  std::map<IntentId, Pipeline> per_intent_truth;
  std::set<IntentId> max_subset;
  int objective_value = 0;
};

class InfeasibleIntent : public Error {
public:
  using Error::Error;
};

inline constexpr int kMaxGroundTruthLength = 5;

/// Directive the reference pipeline gives `x` under `intent`: every controlled param is set to the
/// comma-joined intent targets that x pushes in the desired direction ("latency-"), else "baseline".
Directive ground_truth_directive(const XAppProfile& x, const Intent& intent);

/// Chain pipeline over `ids`: nodes sorted by (stage, id), one edge between consecutive nodes.
Pipeline stage_chain(const Intent& intent, const std::vector<XAppId>& ids, const Registry& registry);

/// Minimum-size, internally conflict-free, capability-covering chain containing the intent's
/// mandatory xApps. Ties go to the lexicographically smallest stage-ordered id sequence.
Pipeline synthesize_ground_truth(const Intent& intent, const Registry& registry,
                                 const VendorCompatibilityMatrix& m, int max_len = kMaxGroundTruthLength);

/// Compatibility structure for subset search: vertex i is ids[i] (ascending).
struct SubsetProblem {
  std::vector<IntentId> ids;
  std::vector<bool> standalone_ok;          // valid alone against pre-deployed pipelines
  std::vector<std::uint32_t> conflict_mask;  // bit j set iff i and j conflict
  std::vector<bool> correct;
};

enum class SubsetPriority {
  SizeFirst,     // |S|, then correct count
  CorrectFirst,  // correct count, then |S|
};

struct SubsetChoice {
  std::uint32_t mask = 0;
  int size = 0;
  int correct = 0;
  std::set<IntentId> members(const SubsetProblem& p) const;
};

inline constexpr std::size_t kMaxSubsetVertices = 24;

/// Exhaustive search over all 2^n subsets, OpenMP-parallel over masks. Feasible subsets contain
/// only standalone-valid, pairwise non-conflicting vertices. Final tie-break: lexicographically
/// smallest sorted id sequence, so the answer is canonical.
SubsetChoice best_valid_subset(const SubsetProblem& problem, SubsetPriority priority);

namespace reference {
SubsetChoice best_valid_subset(const SubsetProblem& problem, SubsetPriority priority);
}  // namespace reference

/// Builds the compatibility structure from pipelines; `truths` (optional) fills `correct`.
SubsetProblem make_subset_problem(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                                  const ConflictContext& ctx,
                                  const std::map<IntentId, Pipeline>* truths = nullptr);

/// Largest subset of candidates deployable together with `pre`. Ties: more
/// correct pipelines (when truths are given), then smallest sorted intent-id sequence.
OracleResult max_conflict_free_subset(const std::map<IntentId, Pipeline>& candidates,
                                      const DeploymentState& pre, const ConflictContext& ctx,
                                      const std::map<IntentId, Pipeline>* truths = nullptr);

SolutionScore score_solution(const std::map<IntentId, Pipeline>& proposed, const std::set<IntentId>& deployed,
                             const std::map<IntentId, Pipeline>& truths, std::size_t conflict_total);

void to_json(Json& j, const SolutionScore& s);
void from_json(const Json& j, SolutionScore& s);
void to_json(Json& j, const OracleResult& r);

}  // namespace rapp
