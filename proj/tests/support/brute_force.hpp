#pragma once

// Slow restatements of the conflict predicates and of subset selection, used as test oracles.
// They walk the universe of possible subjects (every xApp, param, KPI, dialect pair) instead of
// the pipelines' own structure, and use a transitive closure instead of path search.

#include <set>
#include <vector>

#include "rapp/conflict.hpp"
#include "rapp/planner.hpp"

namespace rapp::testkit::brute {

std::vector<ConflictRecord> actuator(const Pipeline& a, const Pipeline& b, const Registry& reg);
std::vector<ConflictRecord> parameter(const Pipeline& a, const Pipeline& b, const Registry& reg);
std::vector<ConflictRecord> objective(const Pipeline& a, const Intent& ia, const Pipeline& b, const Intent& ib,
                                      const Registry& reg);
std::vector<ConflictRecord> vendor(const Pipeline& a, const Pipeline& b, const Registry& reg,
                                   const VendorCompatibilityMatrix& m);
std::vector<ConflictRecord> internal_coupling(const Pipeline& p, const Registry& reg);
std::vector<ConflictRecord> intra_vendor(const Pipeline& p, const Registry& reg, const VendorCompatibilityMatrix& m);

bool pair_conflict(const Pipeline& a, const Pipeline& b, const ConflictContext& ctx);
bool valid(const Pipeline& p, const std::vector<Pipeline>& others, const ConflictContext& ctx);

/// Best subset by recursive include/exclude branching. Ties: lexicographically smallest id list.
std::set<IntentId> best_subset(const SubsetProblem& p, SubsetPriority priority);

}  // namespace rapp::testkit::brute
