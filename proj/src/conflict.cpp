#include "rapp/conflict.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include <omp.h>

namespace rapp {

std::string to_string(ConflictKind k) {
  switch (k) {
    case ConflictKind::ActuatorContention: return "ActuatorContention";
    case ConflictKind::ParameterCoupling: return "ParameterCoupling";
    case ConflictKind::ObjectiveInterference: return "ObjectiveInterference";
    case ConflictKind::VendorInterop: return "VendorInterop";
  }
  return "ActuatorContention";
}

ConflictKind conflict_kind_from_string(const std::string& s) {
  if (s == "ActuatorContention") return ConflictKind::ActuatorContention;
  if (s == "ParameterCoupling") return ConflictKind::ParameterCoupling;
  if (s == "ObjectiveInterference") return ConflictKind::ObjectiveInterference;
  if (s == "VendorInterop") return ConflictKind::VendorInterop;
  throw Error("unknown conflict kind '" + s + "'");
}

bool canonical_less(const ConflictRecord& a, const ConflictRecord& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.subject != b.subject) return a.subject < b.subject;
  return a.participants < b.participants;
}

void canonicalize(std::vector<ConflictRecord>& records) {
  for (auto& r : records) {
    std::sort(r.participants.begin(), r.participants.end());
    r.participants.erase(std::unique(r.participants.begin(), r.participants.end()), r.participants.end());
  }
  std::stable_sort(records.begin(), records.end(), canonical_less);
}

void VendorCompatibilityMatrix::add(const std::string& a, const std::string& b) {
  if (a == b) throw Error("vendor matrix: self pair '" + a + "'");
  pairs_.insert(a < b ? std::pair{a, b} : std::pair{b, a});
}

bool VendorCompatibilityMatrix::incompatible(const std::string& a, const std::string& b) const {
  if (a == b) return false;
  return pairs_.count(a < b ? std::pair{a, b} : std::pair{b, a}) > 0;
}

const Intent& ConflictContext::intent(IntentId id) const {
  auto it = intents.find(id);
  if (it == intents.end()) throw Error("no intent with id " + std::to_string(id));
  return it->second;
}

namespace {

ConflictRecord make_record(ConflictKind kind, std::string subject, std::vector<Participant> parts,
                           std::string explanation) {
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  return {kind, std::move(parts), std::move(subject), std::move(explanation)};
}

std::string dialect_pair(const std::string& a, const std::string& b) {
  return a < b ? a + "|" + b : b + "|" + a;
}

std::set<std::string> touched_kpis(const XAppProfile& x) {
  std::set<std::string> out;
  for (const auto& [k, d] : x.kpi_effects)
    if (d != 0) out.insert(k);
  return out;
}

template <class A, class B>
bool intersects(const A& a, const B& b) {
  for (const auto& v : a)
    if (b.count(v)) return true;
  return false;
}

std::string rapp_name(IntentId id) { return "rApp " + std::to_string(id); }

}  // namespace

std::vector<ConflictRecord> detect_actuator_contention(const Pipeline& a, const Pipeline& b) {
  std::vector<ConflictRecord> out;
  for (const auto& na : a.nodes) {
    const auto* nb = b.node(na.xapp_id);
    if (!nb) continue;
    if (normalize_directive(na.directive) == normalize_directive(nb->directive)) continue;
    out.push_back(make_record(ConflictKind::ActuatorContention, na.xapp_id,
                              {{a.intent_id, na.xapp_id}, {b.intent_id, na.xapp_id}},
                              rapp_name(a.intent_id) + " and " + rapp_name(b.intent_id) +
                                  " issue different directives to " + na.xapp_id));
  }
  canonicalize(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ConflictRecord> detect_parameter_coupling(const Pipeline& a, const Pipeline& b,
                                                      const Registry& registry) {
  std::map<std::string, std::set<XAppId>> writers_a, writers_b;
  for (const auto& n : a.nodes)
    for (const auto& q : registry.at(n.xapp_id).controlled_params) writers_a[q].insert(n.xapp_id);
  for (const auto& n : b.nodes)
    for (const auto& q : registry.at(n.xapp_id).controlled_params) writers_b[q].insert(n.xapp_id);

  std::vector<ConflictRecord> out;
  for (const auto& [q, wa] : writers_a) {
    auto it = writers_b.find(q);
    if (it == writers_b.end()) continue;
    const auto& wb = it->second;
    bool distinct = false;
    for (const auto& x : wa)
      for (const auto& y : wb)
        if (x != y) distinct = true;
    if (!distinct) continue;
    std::vector<Participant> parts;
    for (const auto& x : wa) parts.push_back({a.intent_id, x});
    for (const auto& y : wb) parts.push_back({b.intent_id, y});
    out.push_back(make_record(ConflictKind::ParameterCoupling, q, std::move(parts),
                              "different xApps of " + rapp_name(a.intent_id) + " and " +
                                  rapp_name(b.intent_id) + " both write " + q));
  }
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> detect_objective_interference(const Pipeline& a, const Intent& intent_a,
                                                          const Pipeline& b, const Intent& intent_b,
                                                          const Registry& registry) {
  std::set<std::string> kpis;
  for (const auto& [k, _] : intent_a.target_kpis) kpis.insert(k);
  for (const auto& [k, _] : intent_b.target_kpis) kpis.insert(k);

  std::vector<ConflictRecord> out;
  for (const auto& k : kpis) {
    const Direction ta = intent_a.target_on(k);
    const Direction tb = intent_b.target_on(k);
    bool opposed_targets = ta != 0 && tb != 0 && ta == -tb;
    bool opposed_effect = false;
    std::ostringstream why;
    if (opposed_targets)
      why << rapp_name(a.intent_id) << " and " << rapp_name(b.intent_id) << " pursue opposite targets on " << k;

    for (const auto& n : b.nodes) {
      if (ta != 0 && registry.at(n.xapp_id).effect_on(k) == -ta) {
        opposed_effect = true;
        why << (why.tellp() > 0 ? "; " : "") << n.xapp_id << " in " << rapp_name(b.intent_id)
            << " pushes " << k << " against " << rapp_name(a.intent_id);
      }
    }
    for (const auto& n : a.nodes) {
      if (tb != 0 && registry.at(n.xapp_id).effect_on(k) == -tb) {
        opposed_effect = true;
        why << (why.tellp() > 0 ? "; " : "") << n.xapp_id << " in " << rapp_name(a.intent_id)
            << " pushes " << k << " against " << rapp_name(b.intent_id);
      }
    }
    if (!opposed_targets && !opposed_effect) continue;

    std::vector<Participant> parts;
    auto add_side = [&](const Pipeline& p) {
      bool any = false;
      for (const auto& n : p.nodes) {
        if (registry.at(n.xapp_id).effect_on(k) != 0) {
          parts.push_back({p.intent_id, n.xapp_id});
          any = true;
        }
      }
      if (!any) parts.push_back({p.intent_id, kWholePipeline});
    };
    add_side(a);
    add_side(b);
    out.push_back(make_record(ConflictKind::ObjectiveInterference, k, std::move(parts), why.str()));
  }
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> detect_vendor_conflicts(const Pipeline& a, const Pipeline& b,
                                                    const Registry& registry,
                                                    const VendorCompatibilityMatrix& m) {
  std::vector<ConflictRecord> out;
  for (const auto& na : a.nodes) {
    const auto& xa = registry.at(na.xapp_id);
    for (const auto& nb : b.nodes) {
      const auto& xb = registry.at(nb.xapp_id);
      if (!m.incompatible(xa.dialect, xb.dialect)) continue;
      bool contact = intersects(xa.controlled_params, xb.controlled_params) ||
                     intersects(touched_kpis(xa), touched_kpis(xb));
      if (!contact) continue;
      out.push_back(make_record(ConflictKind::VendorInterop, dialect_pair(xa.dialect, xb.dialect),
                                {{a.intent_id, xa.id}, {b.intent_id, xb.id}},
                                xa.id + " (" + xa.dialect + ") and " + xb.id + " (" + xb.dialect +
                                    ") act on shared resources with incompatible semantics"));
    }
  }
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> detect_vendor_conflicts(const Pipeline& p, const Registry& registry,
                                                    const VendorCompatibilityMatrix& m) {
  std::vector<ConflictRecord> out;
  for (const auto& [u, v] : p.edges) {
    const auto* xu = registry.find(u);
    const auto* xv = registry.find(v);
    if (!xu || !xv || !m.incompatible(xu->dialect, xv->dialect)) continue;
    out.push_back(make_record(ConflictKind::VendorInterop, dialect_pair(xu->dialect, xv->dialect),
                              {{p.intent_id, u}, {p.intent_id, v}},
                              "edge " + u + " -> " + v + " joins incompatible dialects"));
  }
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> detect_internal_coupling(const Pipeline& p, const Registry& registry) {
  std::map<std::string, std::vector<XAppId>> writers;
  for (const auto& id : p.node_ids())
    for (const auto& q : registry.at(id).controlled_params) writers[q].push_back(id);

  std::vector<ConflictRecord> out;
  for (const auto& [q, ws] : writers) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
      for (std::size_t j = i + 1; j < ws.size(); ++j) {
        if (has_path(p, ws[i], ws[j]) || has_path(p, ws[j], ws[i])) continue;
        out.push_back(make_record(ConflictKind::ParameterCoupling, q,
                                  {{p.intent_id, ws[i]}, {p.intent_id, ws[j]}},
                                  ws[i] + " and " + ws[j] + " write " + q + " without an ordering edge"));
      }
    }
  }
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> pair_conflicts(const Pipeline& a, const Pipeline& b, const ConflictContext& ctx) {
  std::vector<ConflictRecord> out = detect_actuator_contention(a, b);
  auto append = [&out](std::vector<ConflictRecord> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(detect_parameter_coupling(a, b, ctx.registry));
  append(detect_objective_interference(a, ctx.intent(a.intent_id), b, ctx.intent(b.intent_id), ctx.registry));
  append(detect_vendor_conflicts(a, b, ctx.registry, ctx.matrix));
  canonicalize(out);
  return out;
}

std::vector<ConflictRecord> internal_conflicts(const Pipeline& p, const ConflictContext& ctx) {
  std::vector<ConflictRecord> out = detect_internal_coupling(p, ctx.registry);
  auto more = detect_vendor_conflicts(p, ctx.registry, ctx.matrix);
  out.insert(out.end(), more.begin(), more.end());
  canonicalize(out);
  return out;
}

Validity validity(const Pipeline& p, const std::vector<Pipeline>& others, const ConflictContext& ctx) {
  Validity v;
  v.records = internal_conflicts(p, ctx);
  for (const auto& o : others) {
    auto r = pair_conflicts(p, o, ctx);
    v.records.insert(v.records.end(), r.begin(), r.end());
  }
  canonicalize(v.records);
  v.valid = v.records.empty();
  return v;
}

std::size_t ConflictGraph::record_count() const {
  std::size_t n = 0;
  for (const auto& [_, rs] : edges) n += rs.size();
  return n;
}

const std::vector<ConflictRecord>& ConflictGraph::between(IntentId u, IntentId v) const {
  static const std::vector<ConflictRecord> kEmpty;
  auto it = edges.find({std::min(u, v), std::max(u, v)});
  return it == edges.end() ? kEmpty : it->second;
}

std::vector<ConflictRecord> ConflictGraph::touching(IntentId v) const {
  std::vector<ConflictRecord> out;
  for (const auto& [e, rs] : edges)
    if (e.first == v || e.second == v) out.insert(out.end(), rs.begin(), rs.end());
  canonicalize(out);
  return out;
}

namespace {

std::vector<const Pipeline*> gather(const std::vector<Pipeline>& candidates, const DeploymentState& pre) {
  std::vector<const Pipeline*> all;
  for (const auto& p : candidates) all.push_back(&p);
  for (const auto& p : pre.active) all.push_back(&p);
  std::stable_sort(all.begin(), all.end(),
                   [](const Pipeline* a, const Pipeline* b) { return a->intent_id < b->intent_id; });
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i]->intent_id == all[i - 1]->intent_id)
      throw Error("conflict graph: duplicate pipeline ref " + std::to_string(all[i]->intent_id));
  return all;
}

ConflictGraph assemble(const std::vector<const Pipeline*>& all,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                       std::vector<std::vector<ConflictRecord>>& results) {
  ConflictGraph g;
  for (const auto* p : all) g.vertices.insert(p->intent_id);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (results[k].empty()) continue;
    IntentId u = all[pairs[k].first]->intent_id;
    IntentId v = all[pairs[k].second]->intent_id;
    g.edges[{std::min(u, v), std::max(u, v)}] = std::move(results[k]);
  }
  return g;
}

std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<ConflictRecord> evaluate_pair(const Pipeline& a, const Pipeline& b, bool self,
                                          const ConflictContext& ctx) {
  return self ? internal_conflicts(a, ctx) : pair_conflicts(a, b, ctx);
}

}  // namespace

ConflictGraph build_conflict_graph(const std::vector<Pipeline>& candidates, const DeploymentState& pre,
                                   const ConflictContext& ctx) {
  auto all = gather(candidates, pre);
  auto pairs = pair_list(all.size());
  std::vector<std::vector<ConflictRecord>> results(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    try {
      results[static_cast<std::size_t>(k)] = evaluate_pair(*all[i], *all[j], i == j, ctx);
    } catch (...) {
#pragma omp critical(rapp_conflict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return assemble(all, pairs, results);
}

namespace reference {

ConflictGraph build_conflict_graph(const std::vector<Pipeline>& candidates, const DeploymentState& pre,
                                   const ConflictContext& ctx) {
  auto all = gather(candidates, pre);
  auto pairs = pair_list(all.size());
  std::vector<std::vector<ConflictRecord>> results;
  results.reserve(pairs.size());
  for (const auto& [i, j] : pairs) results.push_back(evaluate_pair(*all[i], *all[j], i == j, ctx));
  return assemble(all, pairs, results);
}

}  // namespace reference

void to_json(Json& j, const ConflictRecord& r) {
  Json parts = Json::array();
  for (const auto& p : r.participants) parts.push_back({{"rapp", p.rapp}, {"xapp", p.xapp}});
  j = Json{{"kind", to_string(r.kind)},
           {"subject", r.subject},
           {"participants", std::move(parts)},
           {"explanation", r.explanation}};
}

void from_json(const Json& j, ConflictRecord& r) {
  r.kind = conflict_kind_from_string(j.at("kind").get<std::string>());
  r.subject = j.at("subject").get<std::string>();
  r.explanation = j.value("explanation", "");
  r.participants.clear();
  for (const auto& p : j.at("participants"))
    r.participants.push_back({p.at("rapp").get<int>(), p.at("xapp").get<std::string>()});
  std::sort(r.participants.begin(), r.participants.end());
}

void to_json(Json& j, const VendorCompatibilityMatrix& m) {
  Json pairs = Json::array();
  for (const auto& [a, b] : m.pairs()) pairs.push_back(Json::array({a, b}));
  j = Json{{"incompatible", std::move(pairs)}};
}

void from_json(const Json& j, VendorCompatibilityMatrix& m) {
  m = {};
  for (const auto& p : j.at("incompatible")) m.add(p.at(0).get<std::string>(), p.at(1).get<std::string>());
}

}  // namespace rapp
