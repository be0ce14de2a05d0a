#include "rapp/documents.hpp"

#include <algorithm>
#include <array>

namespace rapp {

namespace {

constexpr std::array<std::pair<const char*, ConflictKind>, 4> kGroups{{
    {"actuator", ConflictKind::ActuatorContention},
    {"parameter", ConflictKind::ParameterCoupling},
    {"objective", ConflictKind::ObjectiveInterference},
    {"vendor", ConflictKind::VendorInterop},
}};

constexpr std::array<std::pair<const char*, EditKind>, 5> kEditNames{{
    {"remove_duplicate", EditKind::RemoveDuplicate},
    {"drop_superfluous", EditKind::DropSuperfluous},
    {"reorder_stage", EditKind::ReorderStage},
    {"replace_xapp", EditKind::ReplaceXApp},
    {"adjust_conditions", EditKind::AdjustConditions},
}};

void unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where,
                  std::vector<std::string>& errs) {
  for (const auto& [k, _] : j.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      errs.push_back(where + ": unknown key '" + k + "'");
}

template <class T>
Parsed<T> fail(std::vector<std::string> errs) {
  return {std::nullopt, std::move(errs)};
}

}  // namespace

std::string to_string(EditKind k) {
  for (const auto& [name, kind] : kEditNames)
    if (kind == k) return name;
  return "?";
}

std::optional<EditKind> edit_kind_from_string(const std::string& s) {
  for (const auto& [name, kind] : kEditNames)
    if (s == name) return kind;
  return std::nullopt;
}

PolicyDoc to_policy_doc(const Pipeline& p) {
  return {p.intent_id, p.nodes, std::vector<Edge>(p.edges.begin(), p.edges.end()), p.deployment_conditions};
}

Pipeline to_pipeline(const PolicyDoc& d) {
  Pipeline p;
  p.intent_id = d.intent_id;
  p.nodes = d.selected_xapps;
  p.edges.insert(d.edges.begin(), d.edges.end());
  p.deployment_conditions = d.deployment_conditions;
  return p;
}

PerceptionDoc perception_from_graph(const ConflictGraph& g, std::string notes) {
  PerceptionDoc d;
  for (const auto& [_, recs] : g.edges) d.conflicts.insert(d.conflicts.end(), recs.begin(), recs.end());
  canonicalize(d.conflicts);
  d.notes = std::move(notes);
  return d;
}

Json to_json(const PerceptionDoc& d) {
  Json groups = Json::object();
  for (const auto& [name, kind] : kGroups) {
    Json arr = Json::array();
    for (const auto& r : d.conflicts) {
      if (r.kind != kind) continue;
      Json parts = Json::array();
      for (const auto& p : r.participants) parts.push_back({{"rapp", p.rapp}, {"xapp", p.xapp}});
      arr.push_back({{"subject", r.subject}, {"participants", std::move(parts)}, {"explanation", r.explanation}});
    }
    groups[name] = std::move(arr);
  }
  return {{"conflicts", std::move(groups)}, {"notes", d.notes}};
}

Json to_json(const PolicyDoc& d) {
  Json nodes = Json::array();
  for (const auto& n : d.selected_xapps) nodes.push_back({{"xapp_id", n.xapp_id}, {"directive", n.directive}});
  Json edges = Json::array();
  for (const auto& [a, b] : d.edges) edges.push_back(Json::array({a, b}));
  return {{"intent_id", d.intent_id},
          {"selected_xapps", std::move(nodes)},
          {"edges", std::move(edges)},
          {"deployment_conditions", d.deployment_conditions}};
}

Json to_json(const RefinementDoc& d) {
  Json edits = Json::array();
  for (const auto& e : d.edits) edits.push_back({{"kind", to_string(e.kind)}, {"rationale", e.rationale}});
  return {{"revised_policy", to_json(d.revised_policy)}, {"edits", std::move(edits)}};
}

Parsed<Json> extract_json(const std::string& text) {
  std::string body = text;
  auto fence = body.find("```");
  if (fence != std::string::npos) {
    auto start = body.find('\n', fence);
    auto stop = body.rfind("```");
    if (start != std::string::npos && stop > start) body = body.substr(start + 1, stop - start - 1);
  }
  try {
    return {Json::parse(body), {}};
  } catch (const nlohmann::json::parse_error& e) {
    return fail<Json>({std::string("response is not valid JSON: ") + e.what()});
  }
}

Parsed<PerceptionDoc> parse_perception(const std::string& text) {
  auto j = extract_json(text);
  if (!j.ok()) return fail<PerceptionDoc>(j.errors);
  const Json& doc = *j.value;
  std::vector<std::string> errs;
  if (!doc.is_object()) return fail<PerceptionDoc>({"perception report must be a JSON object"});
  unknown_keys(doc, {"conflicts", "notes"}, "perception", errs);
  PerceptionDoc out;
  if (doc.contains("notes")) {
    if (doc["notes"].is_string()) out.notes = doc["notes"].get<std::string>();
    else errs.push_back("perception.notes must be a string");
  }
  if (!doc.contains("conflicts") || !doc["conflicts"].is_object()) {
    errs.push_back("perception.conflicts must be an object keyed by actuator/parameter/objective/vendor");
    return fail<PerceptionDoc>(errs);
  }
  const Json& groups = doc["conflicts"];
  unknown_keys(groups, {"actuator", "parameter", "objective", "vendor"}, "perception.conflicts", errs);
  for (const auto& [name, kind] : kGroups) {
    if (!groups.contains(name)) continue;
    const std::string where = std::string("perception.conflicts.") + name;
    if (!groups[name].is_array()) {
      errs.push_back(where + " must be an array");
      continue;
    }
    for (const auto& r : groups[name]) {
      if (!r.is_object()) {
        errs.push_back(where + ": record must be an object");
        continue;
      }
      unknown_keys(r, {"subject", "participants", "explanation", "kind"}, where, errs);
      ConflictRecord rec;
      rec.kind = kind;
      if (r.contains("kind") && (!r["kind"].is_string() || r["kind"].get<std::string>() != to_string(kind)))
        errs.push_back(where + ": kind disagrees with its group");
      if (!r.contains("subject") || !r["subject"].is_string()) {
        errs.push_back(where + ": subject must be a string");
      } else {
        rec.subject = r["subject"].get<std::string>();
      }
      if (r.contains("explanation")) {
        if (r["explanation"].is_string()) rec.explanation = r["explanation"].get<std::string>();
        else errs.push_back(where + ": explanation must be a string");
      }
      if (!r.contains("participants") || !r["participants"].is_array() || r["participants"].empty()) {
        errs.push_back(where + ": participants must be a non-empty array");
        continue;
      }
      for (const auto& p : r["participants"]) {
        if (!p.is_object() || p.size() != 2 || !p.contains("rapp") || !p["rapp"].is_number_integer() ||
            !p.contains("xapp") || !p["xapp"].is_string()) {
          errs.push_back(where + ": participant needs integer rapp and string xapp");
          continue;
        }
        rec.participants.push_back({p["rapp"].get<IntentId>(), p["xapp"].get<std::string>()});
      }
      std::sort(rec.participants.begin(), rec.participants.end());
      rec.participants.erase(std::unique(rec.participants.begin(), rec.participants.end()), rec.participants.end());
      out.conflicts.push_back(std::move(rec));
    }
  }
  if (!errs.empty()) return fail<PerceptionDoc>(errs);
  canonicalize(out.conflicts);
  return {std::move(out), {}};
}

Parsed<PolicyDoc> parse_policy(const Json& j, const Registry& registry, IntentId expected_intent) {
  std::vector<std::string> errs;
  if (!j.is_object()) return fail<PolicyDoc>({"policy must be a JSON object"});
  unknown_keys(j, {"intent_id", "selected_xapps", "edges", "deployment_conditions"}, "policy", errs);
  PolicyDoc d;
  if (!j.contains("intent_id") || !j["intent_id"].is_number_integer()) {
    errs.push_back("policy.intent_id must be an integer");
  } else {
    d.intent_id = j["intent_id"].get<IntentId>();
    if (d.intent_id != expected_intent)
      errs.push_back("policy.intent_id is " + std::to_string(d.intent_id) + ", expected " +
                     std::to_string(expected_intent));
  }
  if (!j.contains("selected_xapps") || !j["selected_xapps"].is_array()) {
    errs.push_back("policy.selected_xapps must be an array");
  } else {
    for (const auto& n : j["selected_xapps"]) {
      if (!n.is_object() || !n.contains("xapp_id") || !n["xapp_id"].is_string()) {
        errs.push_back("policy.selected_xapps: entry needs a string xapp_id");
        continue;
      }
      unknown_keys(n, {"xapp_id", "directive"}, "policy.selected_xapps", errs);
      PipelineNode node{n["xapp_id"].get<std::string>(), {}};
      if (!registry.contains(node.xapp_id)) errs.push_back("policy.selected_xapps: unknown xApp '" + node.xapp_id + "'");
      if (n.contains("directive")) {
        if (!n["directive"].is_object()) {
          errs.push_back("policy.selected_xapps: directive of " + node.xapp_id + " must be an object");
        } else {
          for (const auto& [k, v] : n["directive"].items()) {
            if (v.is_string()) node.directive[k] = v.get<std::string>();
            else errs.push_back("policy.selected_xapps: directive values must be strings (" + node.xapp_id + "." + k + ")");
          }
        }
      }
      d.selected_xapps.push_back(std::move(node));
    }
  }
  if (!j.contains("edges") || !j["edges"].is_array()) {
    errs.push_back("policy.edges must be an array");
  } else {
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        errs.push_back("policy.edges: each edge is a [from, to] pair of xApp ids");
        continue;
      }
      d.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  if (!j.contains("deployment_conditions")) {
    errs.push_back("policy.deployment_conditions is required");
  } else {
    auto cerrs = check_conditions_schema(j["deployment_conditions"]);
    if (cerrs.empty()) d.deployment_conditions = j["deployment_conditions"].get<DeploymentConditions>();
    errs.insert(errs.end(), cerrs.begin(), cerrs.end());
  }
  if (!errs.empty()) return fail<PolicyDoc>(errs);
  return {std::move(d), {}};
}

Parsed<PolicyDoc> parse_policy(const std::string& text, const Registry& registry, IntentId expected_intent) {
  auto j = extract_json(text);
  if (!j.ok()) return fail<PolicyDoc>(j.errors);
  return parse_policy(*j.value, registry, expected_intent);
}

Parsed<RefinementDoc> parse_refinement(const std::string& text, const Registry& registry, const PolicyDoc& input) {
  auto j = extract_json(text);
  if (!j.ok()) return fail<RefinementDoc>(j.errors);
  const Json& doc = *j.value;
  if (!doc.is_object()) return fail<RefinementDoc>({"refinement must be a JSON object"});
  std::vector<std::string> errs;
  unknown_keys(doc, {"revised_policy", "edits"}, "refinement", errs);
  RefinementDoc out;
  if (!doc.contains("revised_policy")) {
    errs.push_back("refinement.revised_policy is required");
  } else {
    auto p = parse_policy(doc["revised_policy"], registry, input.intent_id);
    if (p.ok()) out.revised_policy = *p.value;
    for (const auto& e : p.errors) errs.push_back("refinement." + e);
  }
  if (!doc.contains("edits") || !doc["edits"].is_array()) {
    errs.push_back("refinement.edits must be an array");
  } else {
    for (const auto& e : doc["edits"]) {
      if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) {
        errs.push_back("refinement.edits: entry needs a string kind");
        continue;
      }
      unknown_keys(e, {"kind", "rationale"}, "refinement.edits", errs);
      auto kind = edit_kind_from_string(e["kind"].get<std::string>());
      if (!kind) {
        errs.push_back("refinement.edits: unknown kind '" + e["kind"].get<std::string>() + "'");
        continue;
      }
      std::string why;
      if (e.contains("rationale")) {
        if (e["rationale"].is_string()) why = e["rationale"].get<std::string>();
        else errs.push_back("refinement.edits: rationale must be a string");
      }
      out.edits.push_back({*kind, why});
    }
  }
  if (errs.empty()) {
    const bool changed = !(to_pipeline(out.revised_policy) == to_pipeline(input));
    if (changed && out.edits.empty()) errs.push_back("refinement: policy changed but no edits listed");
    if (!changed && !out.edits.empty()) errs.push_back("refinement: edits listed but policy unchanged");
  }
  if (!errs.empty()) return fail<RefinementDoc>(errs);
  return {std::move(out), {}};
}

Parsed<std::map<IntentId, PolicyDoc>> parse_single_agent(const std::string& text, const Registry& registry,
                                                         const std::vector<IntentId>& intents) {
  using Out = std::map<IntentId, PolicyDoc>;
  auto j = extract_json(text);
  if (!j.ok()) return fail<Out>(j.errors);
  const Json& doc = *j.value;
  if (!doc.is_object() || !doc.contains("policies") || !doc["policies"].is_array())
    return fail<Out>({"response must be an object with a 'policies' array"});
  std::vector<std::string> errs;
  unknown_keys(doc, {"policies"}, "response", errs);
  Out out;
  for (const auto& p : doc["policies"]) {
    if (!p.is_object() || !p.contains("intent_id") || !p["intent_id"].is_number_integer()) {
      errs.push_back("policies: entry needs an integer intent_id");
      continue;
    }
    const IntentId id = p["intent_id"].get<IntentId>();
    if (std::find(intents.begin(), intents.end(), id) == intents.end()) {
      errs.push_back("policies: intent " + std::to_string(id) + " was not requested");
      continue;
    }
    if (out.count(id)) {
      errs.push_back("policies: intent " + std::to_string(id) + " appears twice");
      continue;
    }
    auto parsed = parse_policy(p, registry, id);
    if (parsed.ok()) out[id] = *parsed.value;
    errs.insert(errs.end(), parsed.errors.begin(), parsed.errors.end());
  }
  for (IntentId id : intents)
    if (!out.count(id) && errs.empty()) errs.push_back("policies: missing intent " + std::to_string(id));
  if (!errs.empty()) return fail<Out>(errs);
  return {std::move(out), {}};
}

}  // namespace rapp
