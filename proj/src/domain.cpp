#include "rapp/domain.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>

namespace rapp {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Sense: return "sense";
    case Stage::Decide: return "decide";
    case Stage::Act: return "act";
  }
  return "sense";
}

Stage stage_from_string(const std::string& s) {
  if (s == "sense") return Stage::Sense;
  if (s == "decide") return Stage::Decide;
  if (s == "act") return Stage::Act;
  throw Error("unknown stage '" + s + "'");
}

Direction XAppProfile::effect_on(const std::string& kpi) const {
  auto it = kpi_effects.find(kpi);
  return it == kpi_effects.end() ? 0 : it->second;
}

Direction Intent::target_on(const std::string& kpi) const {
  auto it = target_kpis.find(kpi);
  return it == target_kpis.end() ? 0 : it->second;
}

Registry::Registry(std::vector<XAppProfile> profiles, std::set<std::string> kpi_catalog)
    : profiles_(std::move(profiles)), kpis_(std::move(kpi_catalog)) {
  std::sort(profiles_.begin(), profiles_.end(),
            [](const XAppProfile& a, const XAppProfile& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < profiles_.size(); ++i) {
    if (profiles_[i].id == profiles_[i - 1].id)
      throw Error("duplicate xApp id '" + profiles_[i].id + "' in registry");
  }
  if (kpis_.empty()) {
    for (const auto& p : profiles_)
      for (const auto& [k, _] : p.kpi_effects) kpis_.insert(k);
  }
}

const XAppProfile* Registry::find(const XAppId& id) const {
  auto it = std::lower_bound(profiles_.begin(), profiles_.end(), id,
                             [](const XAppProfile& p, const XAppId& v) { return p.id < v; });
  if (it == profiles_.end() || it->id != id) return nullptr;
  return &*it;
}

const XAppProfile& Registry::at(const XAppId& id) const {
  if (const auto* p = find(id)) return *p;
  throw Error("unknown xApp id '" + id + "'");
}

const PipelineNode* Pipeline::node(const XAppId& id) const {
  for (const auto& n : nodes)
    if (n.xapp_id == id) return &n;
  return nullptr;
}

std::set<XAppId> Pipeline::node_ids() const {
  std::set<XAppId> out;
  for (const auto& n : nodes) out.insert(n.xapp_id);
  return out;
}

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::EmptyNodeSet: return "empty_node_set";
    case ViolationKind::UnknownXApp: return "unknown_xapp";
    case ViolationKind::DuplicateNode: return "duplicate_node";
    case ViolationKind::DanglingEdge: return "dangling_edge";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::StageOrder: return "stage_order";
  }
  return "unknown";
}

bool ValidationResult::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

namespace {

// Adjacency over the distinct node ids that are endpoints of known nodes.
std::map<XAppId, std::set<XAppId>> successors(const Pipeline& p) {
  std::map<XAppId, std::set<XAppId>> succ;
  for (const auto& n : p.nodes) succ[n.xapp_id];
  for (const auto& [a, b] : p.edges) {
    if (succ.count(a) && succ.count(b)) succ[a].insert(b);
  }
  return succ;
}

// Returns the ids left over after repeatedly removing zero in-degree nodes.
std::vector<XAppId> kahn(const std::map<XAppId, std::set<XAppId>>& succ,
                         std::vector<XAppId>* order) {
  std::map<XAppId, int> indeg;
  for (const auto& [v, _] : succ) indeg[v];
  for (const auto& [_, outs] : succ)
    for (const auto& w : outs) ++indeg[w];

  std::priority_queue<XAppId, std::vector<XAppId>, std::greater<>> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push(v);

  while (!ready.empty()) {
    XAppId v = ready.top();
    ready.pop();
    if (order) order->push_back(v);
    indeg.erase(v);
    for (const auto& w : succ.at(v))
      if (--indeg[w] == 0) ready.push(w);
  }
  std::vector<XAppId> rest;
  for (const auto& [v, _] : indeg) rest.push_back(v);
  return rest;
}

std::string trim_lower(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ValidationResult validate_pipeline_structure(const Pipeline& p, const Registry& registry) {
  ValidationResult r;
  auto add = [&](ViolationKind k, std::string d) { r.violations.push_back({k, std::move(d)}); };

  if (p.nodes.empty()) add(ViolationKind::EmptyNodeSet, "pipeline has no nodes");

  std::set<XAppId> seen;
  for (const auto& n : p.nodes) {
    if (!registry.contains(n.xapp_id)) add(ViolationKind::UnknownXApp, n.xapp_id);
    if (!seen.insert(n.xapp_id).second) add(ViolationKind::DuplicateNode, n.xapp_id);
  }

  for (const auto& [a, b] : p.edges) {
    if (!seen.count(a) || !seen.count(b)) {
      add(ViolationKind::DanglingEdge, a + "->" + b);
      continue;
    }
    const auto* pa = registry.find(a);
    const auto* pb = registry.find(b);
    if (pa && pb && pa->stage > pb->stage)
      add(ViolationKind::StageOrder, a + "(" + to_string(pa->stage) + ")->" + b + "(" +
                                         to_string(pb->stage) + ")");
  }

  auto rest = kahn(successors(p), nullptr);
  if (!rest.empty()) {
    std::string d;
    for (const auto& v : rest) d += (d.empty() ? "" : ",") + v;
    add(ViolationKind::Cycle, d);
  }
  return r;
}

std::vector<XAppId> topological_order(const Pipeline& p) {
  if (p.nodes.empty()) throw Error("topological_order: empty pipeline");
  std::vector<XAppId> order;
  auto rest = kahn(successors(p), &order);
  if (!rest.empty()) throw Error("topological_order: pipeline contains a cycle");
  return order;
}

bool has_path(const Pipeline& p, const XAppId& from, const XAppId& to) {
  auto succ = successors(p);
  if (!succ.count(from)) return false;
  std::set<XAppId> visited;
  std::vector<XAppId> stack(succ[from].begin(), succ[from].end());
  while (!stack.empty()) {
    XAppId v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    if (!visited.insert(v).second) continue;
    for (const auto& w : succ[v]) stack.push_back(w);
  }
  return false;
}

Directive normalize_directive(const Directive& d) {
  Directive out;
  for (const auto& [k, v] : d) out[trim_lower(k)] = trim_lower(v);
  return out;
}

bool pipelines_equal(const Pipeline& p, const Pipeline& q) {
  if (p.edges != q.edges || p.nodes.size() != q.nodes.size()) return false;
  // Node order is free, multiplicity is not: a repeated xApp never matches a reference.
  std::multimap<XAppId, Directive> a, b;
  for (const auto& n : p.nodes) a.emplace(n.xapp_id, normalize_directive(n.directive));
  for (const auto& n : q.nodes) b.emplace(n.xapp_id, normalize_directive(n.directive));
  return a == b;
}

std::size_t total_nodes(const std::vector<Pipeline>& ps) {
  std::size_t n = 0;
  for (const auto& p : ps) n += p.nodes.size();
  return n;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const XAppProfile& x) {
  j = Json{{"id", x.id},
           {"name", x.name},
           {"vendor", x.vendor},
           {"dialect", x.dialect},
           {"capabilities", x.capabilities},
           {"controlled_params", x.controlled_params},
           {"kpi_effects", x.kpi_effects},
           {"stage", to_string(x.stage)},
           {"interfaces", x.interfaces}};
}

void from_json(const Json& j, XAppProfile& x) {
  x.id = j.at("id").get<std::string>();
  x.name = j.value("name", x.id);
  x.vendor = j.at("vendor").get<std::string>();
  x.dialect = j.at("dialect").get<std::string>();
  x.capabilities = j.at("capabilities").get<std::set<std::string>>();
  x.controlled_params = j.at("controlled_params").get<std::set<std::string>>();
  x.kpi_effects = j.at("kpi_effects").get<std::map<std::string, Direction>>();
  x.stage = stage_from_string(j.at("stage").get<std::string>());
  x.interfaces = j.value("interfaces", std::set<std::string>{});
  if (x.capabilities.empty()) throw Error("xApp '" + x.id + "': capabilities must be nonempty");
  for (const auto& [k, d] : x.kpi_effects)
    if (d < -1 || d > 1) throw Error("xApp '" + x.id + "': kpi effect on '" + k + "' out of range");
}

void to_json(Json& j, const Intent& i) {
  j = Json{{"id", i.id},
           {"text", i.text},
           {"target_kpis", i.target_kpis},
           {"required_capabilities", i.required_capabilities},
           {"required_xapps", i.required_xapps}};
}

void from_json(const Json& j, Intent& i) {
  i.id = j.at("id").get<int>();
  i.text = j.at("text").get<std::string>();
  i.target_kpis = j.at("target_kpis").get<std::map<std::string, Direction>>();
  i.required_capabilities = j.at("required_capabilities").get<std::set<std::string>>();
  i.required_xapps = j.value("required_xapps", std::set<XAppId>{});
  if (i.target_kpis.empty()) throw Error("intent " + std::to_string(i.id) + ": target_kpis empty");
  if (i.required_capabilities.empty())
    throw Error("intent " + std::to_string(i.id) + ": required_capabilities empty");
  for (const auto& [k, d] : i.target_kpis)
    if (d != -1 && d != 1)
      throw Error("intent " + std::to_string(i.id) + ": target on '" + k + "' must be -1 or +1");
}

void to_json(Json& j, const DeploymentConditions& c) {
  j = Json::object();
  Json preds = Json::array();
  for (const auto& p : c.activate_when)
    preds.push_back({{"metric", p.metric}, {"op", p.op}, {"value", p.value}});
  j["activate_when"] = std::move(preds);
  if (c.time_window) j["time_window"] = {{"start", c.time_window->start}, {"end", c.time_window->end}};
}

std::vector<std::string> check_conditions_schema(const Json& j) {
  static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "!="};
  std::vector<std::string> errs;
  if (!j.is_object()) return {"deployment_conditions must be an object"};
  for (const auto& [k, _] : j.items())
    if (k != "activate_when" && k != "time_window")
      errs.push_back("deployment_conditions: unknown key '" + k + "'");
  if (!j.contains("activate_when") || !j["activate_when"].is_array()) {
    errs.push_back("deployment_conditions.activate_when must be an array");
  } else {
    for (const auto& p : j["activate_when"]) {
      if (!p.is_object() || !p.contains("metric") || !p["metric"].is_string() ||
          !p.contains("op") || !p["op"].is_string() || !p.contains("value") || p.size() != 3) {
        errs.push_back("deployment_conditions.activate_when: predicate needs exactly metric, op, value");
        continue;
      }
      if (!ops.count(p["op"].get<std::string>()))
        errs.push_back("deployment_conditions: unsupported operator '" + p["op"].get<std::string>() + "'");
      if (!p["value"].is_string() && !p["value"].is_number())
        errs.push_back("deployment_conditions: predicate value must be string or number");
    }
  }
  if (j.contains("time_window") && !j["time_window"].is_null()) {
    const auto& w = j["time_window"];
    if (!w.is_object() || !w.contains("start") || !w.contains("end") || !w["start"].is_string() ||
        !w["end"].is_string() || w.size() != 2)
      errs.push_back("deployment_conditions.time_window needs string start and end");
  }
  return errs;
}

void from_json(const Json& j, DeploymentConditions& c) {
  auto errs = check_conditions_schema(j);
  if (!errs.empty()) throw Error(errs.front());
  c = {};
  for (const auto& p : j.at("activate_when")) {
    const auto& v = p.at("value");
    c.activate_when.push_back({p.at("metric").get<std::string>(), p.at("op").get<std::string>(),
                               v.is_string() ? v.get<std::string>() : v.dump()});
  }
  if (j.contains("time_window") && !j["time_window"].is_null())
    c.time_window = TimeWindow{j["time_window"].at("start").get<std::string>(),
                               j["time_window"].at("end").get<std::string>()};
}

void to_json(Json& j, const Pipeline& p) {
  Json nodes = Json::array();
  for (const auto& n : p.nodes) nodes.push_back({{"xapp_id", n.xapp_id}, {"directive", n.directive}});
  Json edges = Json::array();
  for (const auto& [a, b] : p.edges) edges.push_back(Json::array({a, b}));
  j = Json{{"intent_id", p.intent_id},
           {"nodes", std::move(nodes)},
           {"edges", std::move(edges)},
           {"deployment_conditions", p.deployment_conditions}};
}

void from_json(const Json& j, Pipeline& p) {
  p = {};
  p.intent_id = j.at("intent_id").get<int>();
  for (const auto& n : j.at("nodes"))
    p.nodes.push_back({n.at("xapp_id").get<std::string>(), n.value("directive", Directive{})});
  for (const auto& e : j.at("edges")) p.edges.insert({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
  if (j.contains("deployment_conditions"))
    p.deployment_conditions = j["deployment_conditions"].get<DeploymentConditions>();
}

}  // namespace rapp
