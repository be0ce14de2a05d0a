#include "rapp/mocks.hpp"

#include <algorithm>

#include "rapp/planner.hpp"
#include "rapp/prompts.hpp"

namespace rapp {

std::shared_ptr<const MockWorld> MockWorld::build(Registry registry, IntentCatalog intents,
                                                  VendorCompatibilityMatrix matrix) {
  auto w = std::make_shared<MockWorld>();
  w->registry = std::move(registry);
  w->intents = std::move(intents);
  w->matrix = std::move(matrix);
  for (const auto& [id, intent] : w->intents) w->truths[id] = synthesize_ground_truth(intent, w->registry, w->matrix);
  return w;
}

namespace {

bool covers_nothing(const XAppProfile& x, const Intent& intent) {
  if (intent.required_xapps.count(x.id)) return false;
  return std::none_of(x.capabilities.begin(), x.capabilities.end(),
                      [&](const std::string& c) { return intent.required_capabilities.count(c) > 0; });
}

const XAppProfile* dialect_sibling(const XAppProfile& x, const Registry& registry) {
  for (const auto& y : registry.profiles())
    if (y.id != x.id && y.capabilities == x.capabilities && y.dialect != x.dialect) return &y;
  return nullptr;
}

void rename(PolicyDoc& d, const XAppId& from, const XAppId& to) {
  for (auto& n : d.selected_xapps)
    if (n.xapp_id == from) n.xapp_id = to;
  for (auto& [a, b] : d.edges) {
    if (a == from) a = to;
    if (b == from) b = to;
  }
}

void remove_xapp(PolicyDoc& d, const XAppId& id) {
  std::erase_if(d.selected_xapps, [&](const PipelineNode& n) { return n.xapp_id == id; });
  std::erase_if(d.edges, [&](const Edge& e) { return e.first == id || e.second == id; });
}

PolicyDoc parse_payload_policy(const Json& j, const Registry& registry) {
  auto p = parse_policy(j, registry, j.at("intent_id").get<IntentId>());
  if (!p.ok()) throw Error("mock received an unparseable policy: " + p.errors.front());
  return *p.value;
}

std::vector<Pipeline> payload_pipelines(const Json& arr, const Registry& registry) {
  std::vector<Pipeline> out;
  if (!arr.is_array()) return out;
  for (const auto& j : arr) out.push_back(to_pipeline(parse_payload_policy(j, registry)));
  return out;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

bool is_repair(const ChatRequest& r) { return r.messages.size() > 2; }

}  // namespace

RefinementDoc mechanical_refinement(const PolicyDoc& candidate, const Intent& intent, const Registry& registry) {
  RefinementDoc out{candidate, {}};
  PolicyDoc& d = out.revised_policy;

  std::set<XAppId> seen;
  std::vector<PipelineNode> unique;
  for (const auto& n : d.selected_xapps) {
    if (seen.insert(n.xapp_id).second) {
      unique.push_back(n);
    } else {
      out.edits.push_back({EditKind::RemoveDuplicate, "removed repeated " + n.xapp_id});
    }
  }
  d.selected_xapps = std::move(unique);

  for (const auto& r : intent.required_xapps) {
    if (seen.count(r) || !registry.contains(r)) continue;
    for (const auto& n : d.selected_xapps) {
      const auto* sib = dialect_sibling(registry.at(n.xapp_id), registry);
      if (sib && sib->id == r) {
        const XAppId old = n.xapp_id;
        rename(d, old, r);
        out.edits.push_back({EditKind::ReplaceXApp, "intent mandates " + r + " instead of its sibling " + old});
        break;
      }
    }
  }

  std::vector<XAppId> idle;
  for (const auto& n : d.selected_xapps)
    if (covers_nothing(registry.at(n.xapp_id), intent)) idle.push_back(n.xapp_id);
  for (const auto& id : idle) {
    remove_xapp(d, id);
    out.edits.push_back({EditKind::DropSuperfluous, id + " covers no required capability"});
  }

  std::vector<PipelineNode> ordered = d.selected_xapps;
  std::stable_sort(ordered.begin(), ordered.end(), [&](const PipelineNode& a, const PipelineNode& b) {
    return std::pair{registry.at(a.xapp_id).stage, a.xapp_id} < std::pair{registry.at(b.xapp_id).stage, b.xapp_id};
  });
  std::vector<Edge> chain;
  for (std::size_t i = 1; i < ordered.size(); ++i) chain.emplace_back(ordered[i - 1].xapp_id, ordered[i].xapp_id);
  const std::set<Edge> have(d.edges.begin(), d.edges.end());
  if (ordered != d.selected_xapps || have != std::set<Edge>(chain.begin(), chain.end())) {
    d.selected_xapps = std::move(ordered);
    d.edges = std::move(chain);
    out.edits.push_back({EditKind::ReorderStage, "rebuilt the sense, decide, act chain"});
  }

  if (!out.edits.empty() && to_pipeline(d) == to_pipeline(candidate)) out.edits.clear();
  if (out.edits.empty()) out.revised_policy = candidate;
  return out;
}

Json OracleMockTransport::perception_answer(const Json& payload) const {
  const auto& reg = world_->registry;
  std::vector<Pipeline> cands;
  for (auto& p : payload_pipelines(payload.at("peer_policies"), reg))
    if (validate_pipeline_structure(p, reg).ok()) cands.push_back(std::move(p));
  if (!payload.at("current_candidate").is_null()) {
    auto p = to_pipeline(parse_payload_policy(payload["current_candidate"], reg));
    if (validate_pipeline_structure(p, reg).ok()) cands.push_back(std::move(p));
  }
  DeploymentState pre{payload_pipelines(payload.at("deployed_policies"), reg)};
  ConflictContext ctx{reg, world_->intents, world_->matrix};
  return to_json(perception_from_graph(build_conflict_graph(cands, pre, ctx)));
}

ChatResponse OracleMockTransport::complete(const ChatRequest& request) {
  const Json payload = extract_payload(request);
  const std::string role = payload.at("role").get<std::string>();
  if (role == "perception") return {perception_answer(payload).dump()};
  if (role == "reasoning") {
    const IntentId id = payload.at("intent").at("id").get<IntentId>();
    return {to_json(to_policy_doc(world_->truths.at(id))).dump()};
  }
  if (role == "refinement") {
    const auto intent = payload.at("intent").get<Intent>();
    auto doc = mechanical_refinement(parse_payload_policy(payload.at("candidate"), world_->registry), intent,
                                     world_->registry);
    return {to_json(doc).dump()};
  }
  if (role == "single_agent") {
    Json policies = Json::array();
    for (const auto& item : payload.at("intents"))
      policies.push_back(to_json(to_policy_doc(world_->truths.at(item.at("intent").at("id").get<IntentId>()))));
    return {Json{{"policies", std::move(policies)}}.dump()};
  }
  throw Error("mock transport: unknown role '" + role + "'");
}

std::uint64_t NoisyMockTransport::draw(const std::string& purpose, IntentId intent, int iteration) const {
  std::uint64_t h = mix(seed_);
  for (unsigned char c : purpose) h = mix(h ^ c);
  h = mix(h ^ static_cast<std::uint64_t>(intent));
  return mix(h ^ static_cast<std::uint64_t>(iteration));
}

Pipeline NoisyMockTransport::corrupt(const Pipeline& truth, Corruption kind, std::uint64_t pick, const Intent& intent,
                                     const Registry& registry) {
  auto duplicate = [&] {
    Pipeline p = truth;
    p.nodes.push_back(p.nodes.back());
    return p;
  };
  auto extra = [&] {
    std::vector<XAppId> pool;
    for (const auto& x : registry.profiles())
      if (!truth.has_node(x.id) && covers_nothing(x, intent)) pool.push_back(x.id);
    if (pool.empty()) return duplicate();
    std::vector<XAppId> ids;
    for (const auto& n : truth.nodes) ids.push_back(n.xapp_id);
    ids.push_back(pool[pick % pool.size()]);
    Pipeline p = stage_chain(intent, ids, registry);
    p.deployment_conditions = truth.deployment_conditions;
    return p;
  };
  switch (kind) {
    case Corruption::DuplicateNode:
      return duplicate();
    case Corruption::ExtraXApp:
      return extra();
    case Corruption::DroppedEdge: {
      if (truth.edges.empty()) return extra();
      Pipeline p = truth;
      p.edges.erase(std::next(p.edges.begin(), static_cast<long>(pick % p.edges.size())));
      return p;
    }
    case Corruption::VendorSwap:
      for (const auto& n : truth.nodes) {
        if (const auto* sib = dialect_sibling(registry.at(n.xapp_id), registry)) {
          PolicyDoc d = to_policy_doc(truth);
          rename(d, n.xapp_id, sib->id);
          return to_pipeline(d);
        }
      }
      return duplicate();
  }
  return duplicate();
}

Json NoisyMockTransport::reasoning_answer(const Json& intent_json, const Json& analogues, bool has_perception,
                                          int iteration) const {
  const IntentId id = intent_json.at("id").get<IntentId>();
  for (const auto& a : analogues)
    if (a.at("intent_id").get<IntentId>() == id) return a.at("policy");

  const Pipeline& truth = world_->truths.at(id);
  const double p = has_perception ? kCorruptWithPerception : kCorruptBlind;
  if (unit(draw("corrupt", id, iteration)) >= p) return to_json(to_policy_doc(truth));
  const auto kind = static_cast<Corruption>(draw("kind", id, iteration) % 4);
  return to_json(to_policy_doc(corrupt(truth, kind, draw("pick", id, iteration), world_->intents.at(id),
                                       world_->registry)));
}

ChatResponse NoisyMockTransport::complete(const ChatRequest& request) {
  const Json payload = extract_payload(request);
  const std::string role = payload.at("role").get<std::string>();
  const int iteration = payload.at("iteration").get<int>();
  const IntentId id = payload.contains("intent") ? payload["intent"].at("id").get<IntentId>() : 0;

  Json answer;
  if (role == "perception") {
    answer = perception_answer(payload);
    const int extra = 1 + static_cast<int>(draw("spurious", id, iteration) % 2);
    const auto& xs = world_->registry.profiles();
    static const char* groups[] = {"actuator", "parameter", "objective", "vendor"};
    for (int i = 0; i < extra; ++i) {
      const auto h = draw("spurious-" + std::to_string(i), id, iteration);
      const auto& x = xs[(h >> 8) % xs.size()];
      answer["conflicts"][groups[h % 4]].push_back(
          {{"subject", "suspected:" + x.id},
           {"participants", Json::array({{{"rapp", id}, {"xapp", x.id}}})},
           {"explanation", "possible interaction inferred from the retrieved material"}});
    }
  } else if (role == "reasoning") {
    answer = reasoning_answer(payload.at("intent"), payload.at("analogues"), !payload.at("perception").is_null(),
                              iteration);
  } else if (role == "single_agent") {
    Json policies = Json::array();
    for (const auto& item : payload.at("intents"))
      policies.push_back(reasoning_answer(item.at("intent"), item.at("analogues"), false, iteration));
    answer = Json{{"policies", std::move(policies)}};
  } else {
    return OracleMockTransport::complete(request);
  }

  std::string text = answer.dump();
  if (!is_repair(request) && unit(draw("malformed:" + role, id, iteration)) < kMalformed)
    text = text.substr(0, text.size() / 2);
  return {text};
}

}  // namespace rapp
