#include "rapp/planner.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <functional>

#include <omp.h>

namespace rapp {

Directive ground_truth_directive(const XAppProfile& x, const Intent& intent) {
  std::string aligned;
  for (const auto& [kpi, dir] : intent.target_kpis) {
    if (x.effect_on(kpi) != dir) continue;
    aligned += (aligned.empty() ? "" : ",") + kpi + (dir > 0 ? "+" : "-");
  }
  if (aligned.empty()) aligned = "baseline";
  Directive d;
  for (const auto& q : x.controlled_params) d[q] = aligned;
  return d;
}

Pipeline stage_chain(const Intent& intent, const std::vector<XAppId>& ids, const Registry& registry) {
  std::vector<const XAppProfile*> xs;
  for (const auto& id : ids) xs.push_back(&registry.at(id));
  std::sort(xs.begin(), xs.end(), [](const XAppProfile* a, const XAppProfile* b) {
    return std::pair{a->stage, a->id} < std::pair{b->stage, b->id};
  });
  Pipeline p;
  p.intent_id = intent.id;
  for (const auto* x : xs) p.nodes.push_back({x->id, ground_truth_directive(*x, intent)});
  for (std::size_t i = 1; i < p.nodes.size(); ++i) p.edges.insert({p.nodes[i - 1].xapp_id, p.nodes[i].xapp_id});
  return p;
}

Pipeline synthesize_ground_truth(const Intent& intent, const Registry& registry,
                                 const VendorCompatibilityMatrix& m, int max_len) {
  if (registry.empty()) throw Error("synthesize_ground_truth: empty registry");
  if (max_len < 1 || max_len > kMaxGroundTruthLength)
    throw Error("synthesize_ground_truth: max_len must be in 1.." + std::to_string(kMaxGroundTruthLength));

  const std::string who = "intent " + std::to_string(intent.id);
  std::set<std::string> offered;
  for (const auto& x : registry.profiles()) offered.insert(x.capabilities.begin(), x.capabilities.end());
  for (const auto& c : intent.required_capabilities)
    if (!offered.count(c)) throw InfeasibleIntent(who + ": no xApp offers capability '" + c + "'");
  for (const auto& r : intent.required_xapps)
    if (!registry.contains(r)) throw InfeasibleIntent(who + ": mandatory xApp '" + r + "' not registered");

  const auto& pool = registry.profiles();
  const int n = static_cast<int>(pool.size());

  auto feasible = [&](const std::vector<int>& pick, Pipeline& out) {
    std::set<std::string> caps;
    std::set<XAppId> chosen;
    for (int i : pick) {
      caps.insert(pool[i].capabilities.begin(), pool[i].capabilities.end());
      chosen.insert(pool[i].id);
    }
    for (const auto& r : intent.required_xapps)
      if (!chosen.count(r)) return false;
    for (const auto& c : intent.required_capabilities)
      if (!caps.count(c)) return false;
    std::vector<XAppId> ids(chosen.begin(), chosen.end());
    out = stage_chain(intent, ids, registry);
    return detect_internal_coupling(out, registry).empty() && detect_vendor_conflicts(out, registry, m).empty();
  };

  auto sequence = [](const Pipeline& p) {
    std::vector<XAppId> s;
    for (const auto& nd : p.nodes) s.push_back(nd.xapp_id);
    return s;
  };

  for (int size = 1; size <= std::min(max_len, n); ++size) {
    std::optional<Pipeline> best;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(pick.size()) == size) {
        Pipeline cand;
        if (feasible(pick, cand) && (!best || sequence(cand) < sequence(*best))) best = std::move(cand);
        return;
      }
      for (int i = start; i <= n - (size - static_cast<int>(pick.size())); ++i) {
        pick.push_back(i);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
    if (best) return *best;
  }
  throw InfeasibleIntent(who + ": no conflict-free pipeline of at most " + std::to_string(max_len) +
                         " xApps covers the required capabilities");
}

std::set<IntentId> SubsetChoice::members(const SubsetProblem& p) const {
  std::set<IntentId> out;
  for (std::size_t i = 0; i < p.ids.size(); ++i)
    if (mask & (1u << i)) out.insert(p.ids[i]);
  return out;
}

namespace {

void check_problem(const SubsetProblem& p) {
  const auto n = p.ids.size();
  if (n > kMaxSubsetVertices) throw Error("subset search limited to " + std::to_string(kMaxSubsetVertices) + " vertices");
  if (p.standalone_ok.size() != n || p.conflict_mask.size() != n || p.correct.size() != n)
    throw Error("subset problem: inconsistent vector sizes");
}

bool feasible(const SubsetProblem& p, std::uint32_t mask) {
  for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
    const int i = std::countr_zero(rest);
    if (!p.standalone_ok[i] || (p.conflict_mask[i] & mask)) return false;
  }
  return true;
}

SubsetChoice evaluate(const SubsetProblem& p, std::uint32_t mask) {
  SubsetChoice c{mask, std::popcount(mask), 0};
  for (std::uint32_t rest = mask; rest; rest &= rest - 1)
    if (p.correct[std::countr_zero(rest)]) ++c.correct;
  return c;
}

// Strict "a is preferred over b". Total order over distinct masks.
bool better(const SubsetChoice& a, const SubsetChoice& b, SubsetPriority prio) {
  auto key = [prio](const SubsetChoice& c) {
    return prio == SubsetPriority::SizeFirst ? std::pair{c.size, c.correct} : std::pair{c.correct, c.size};
  };
  if (key(a) != key(b)) return key(a) > key(b);
  const std::uint32_t diff = a.mask ^ b.mask;
  if (!diff) return false;
  // Equal sizes: the set owning the lowest differing id has the smaller sorted sequence.
  return (a.mask >> std::countr_zero(diff)) & 1u;
}

}  // namespace

SubsetChoice best_valid_subset(const SubsetProblem& problem, SubsetPriority priority) {
  check_problem(problem);
  const std::int64_t total = std::int64_t{1} << problem.ids.size();
  SubsetChoice best{};

#pragma omp parallel
  {
    SubsetChoice local{};
#pragma omp for schedule(static)
    for (std::int64_t m = 1; m < total; ++m) {
      const auto mask = static_cast<std::uint32_t>(m);
      if (!feasible(problem, mask)) continue;
      auto c = evaluate(problem, mask);
      if (better(c, local, priority)) local = c;
    }
#pragma omp critical(rapp_subset_merge)
    if (better(local, best, priority)) best = local;
  }
  return best;
}

namespace reference {

SubsetChoice best_valid_subset(const SubsetProblem& problem, SubsetPriority priority) {
  check_problem(problem);
  const std::int64_t total = std::int64_t{1} << problem.ids.size();
  SubsetChoice best{};
  for (std::int64_t m = 1; m < total; ++m) {
    const auto mask = static_cast<std::uint32_t>(m);
    if (!feasible(problem, mask)) continue;
    auto c = evaluate(problem, mask);
    if (better(c, best, priority)) best = c;
  }
  return best;
}

}  // namespace reference

SubsetProblem make_subset_problem(const std::map<IntentId, Pipeline>& candidates, const DeploymentState& pre,
                                  const ConflictContext& ctx, const std::map<IntentId, Pipeline>* truths) {
  SubsetProblem p;
  std::vector<const Pipeline*> ps;
  for (const auto& [id, pl] : candidates) {
    p.ids.push_back(id);
    ps.push_back(&pl);
  }
  const auto n = ps.size();
  if (n > kMaxSubsetVertices) throw Error("too many candidates for exhaustive subset search");
  p.standalone_ok.assign(n, false);
  p.conflict_mask.assign(n, 0);
  p.correct.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    p.standalone_ok[i] = validity(*ps[i], pre.active, ctx).valid;
    if (truths) {
      auto it = truths->find(p.ids[i]);
      p.correct[i] = it != truths->end() && pipelines_equal(*ps[i], it->second);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!pair_conflicts(*ps[i], *ps[j], ctx).empty()) {
        p.conflict_mask[i] |= 1u << j;
        p.conflict_mask[j] |= 1u << i;
      }
    }
  }
  return p;
}

OracleResult max_conflict_free_subset(const std::map<IntentId, Pipeline>& candidates,
                                      const DeploymentState& pre, const ConflictContext& ctx,
                                      const std::map<IntentId, Pipeline>* truths) {
  auto problem = make_subset_problem(candidates, pre, ctx, truths);
  auto choice = best_valid_subset(problem, SubsetPriority::SizeFirst);
  OracleResult r;
  r.per_intent_truth = truths ? *truths : candidates;
  r.max_subset = choice.members(problem);
  r.objective_value = choice.size;
  return r;
}

SolutionScore score_solution(const std::map<IntentId, Pipeline>& proposed, const std::set<IntentId>& deployed,
                             const std::map<IntentId, Pipeline>& truths, std::size_t conflict_total) {
  SolutionScore s;
  for (IntentId id : deployed) {
    auto p = proposed.find(id);
    if (p == proposed.end()) throw Error("score_solution: deployed intent " + std::to_string(id) + " not proposed");
    auto t = truths.find(id);
    if (t != truths.end() && pipelines_equal(p->second, t->second)) ++s.correct_deployed;
  }
  s.deployed = static_cast<std::int64_t>(deployed.size());
  s.neg_conflicts = -static_cast<std::int64_t>(conflict_total);
  std::int64_t nodes = 0;
  for (const auto& [_, p] : proposed) nodes += static_cast<std::int64_t>(p.nodes.size());
  s.neg_total_nodes = -nodes;
  return s;
}

void to_json(Json& j, const SolutionScore& s) {
  j = Json::array({s.correct_deployed, s.deployed, s.neg_conflicts, s.neg_total_nodes});
}

void from_json(const Json& j, SolutionScore& s) {
  s = {j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>(), j.at(2).get<std::int64_t>(),
       j.at(3).get<std::int64_t>()};
}

void to_json(Json& j, const OracleResult& r) {
  Json truths = Json::object();
  for (const auto& [id, p] : r.per_intent_truth) truths[std::to_string(id)] = p;
  j = Json{{"per_intent_truth", std::move(truths)},
           {"max_subset", r.max_subset},
           {"objective_value", r.objective_value}};
}

}  // namespace rapp
