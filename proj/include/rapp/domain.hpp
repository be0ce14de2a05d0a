#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rapp {

using Json = nlohmann::json;
using XAppId = std::string;
using IntentId = int;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Pipeline stage class. Edges may only go from a lower to an equal or higher stage.
enum class Stage { Sense = 0, Decide = 1, Act = 2 };

std::string to_string(Stage s);
Stage stage_from_string(const std::string& s);

/// Expected push of an xApp (or desired push of an intent) on a KPI: -1, 0 or +1.
using Direction = int;

struct XAppProfile {
  XAppId id;
  std::string name;
  std::string vendor;
  std::string dialect;
  std::set<std::string> capabilities;
  std::set<std::string> controlled_params;
  std::map<std::string, Direction> kpi_effects;
  Stage stage = Stage::Sense;
  std::set<std::string> interfaces;

  Direction effect_on(const std::string& kpi) const;
  bool operator==(const XAppProfile&) const = default;
};

/// Registry of xApp profiles keyed by id, plus the KPI catalog the profiles refer to.
class Registry {
public:
  Registry() = default;
  Registry(std::vector<XAppProfile> profiles, std::set<std::string> kpi_catalog = {});

  const XAppProfile& at(const XAppId& id) const;
  const XAppProfile* find(const XAppId& id) const;
  bool contains(const XAppId& id) const { return find(id) != nullptr; }
  bool empty() const { return profiles_.empty(); }
  std::size_t size() const { return profiles_.size(); }

  /// Profiles in ascending id order.
  const std::vector<XAppProfile>& profiles() const { return profiles_; }
  const std::set<std::string>& kpi_catalog() const { return kpis_; }

private:
  std::vector<XAppProfile> profiles_;
  std::set<std::string> kpis_;
};

struct Intent {
  IntentId id = 0;
  std::string text;
  std::map<std::string, Direction> target_kpis;
  std::set<std::string> required_capabilities;
  std::set<XAppId> required_xapps;

  Direction target_on(const std::string& kpi) const;
  bool operator==(const Intent&) const = default;
};

using IntentCatalog = std::map<IntentId, Intent>;

/// Symbolic per-node configuration: param-id -> setting.
using Directive = std::map<std::string, std::string>;

struct PipelineNode {
  XAppId xapp_id;
  Directive directive;
  bool operator==(const PipelineNode&) const = default;
};

using Edge = std::pair<XAppId, XAppId>;

struct ConditionPredicate {
  std::string metric;
  std::string op;  // one of < <= > >= == !=
  std::string value;
  bool operator==(const ConditionPredicate&) const = default;
};

struct TimeWindow {
  std::string start;  // HH:MM
  std::string end;
  bool operator==(const TimeWindow&) const = default;
};

/// Deployment conditions attached to a policy. Validated for shape, never interpreted.
struct DeploymentConditions {
  std::vector<ConditionPredicate> activate_when;
  std::optional<TimeWindow> time_window;
  bool operator==(const DeploymentConditions&) const = default;
};

/// An rApp policy: a DAG of configured xApps plus deployment conditions.
struct Pipeline {
  IntentId intent_id = 0;
  std::vector<PipelineNode> nodes;
  std::set<Edge> edges;
  DeploymentConditions deployment_conditions;

  const PipelineNode* node(const XAppId& id) const;
  bool has_node(const XAppId& id) const { return node(id) != nullptr; }
  std::set<XAppId> node_ids() const;
  /// Full structural identity, including node order and conditions.
  bool operator==(const Pipeline&) const = default;
};

struct DeploymentState {
  std::vector<Pipeline> active;
};

enum class ViolationKind {
  EmptyNodeSet,
  UnknownXApp,
  DuplicateNode,
  DanglingEdge,
  Cycle,
  StageOrder,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string detail;
  bool operator==(const Violation&) const = default;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind k) const;
};

/// Collects every structural violation of `p` against `registry`. Never throws on bad input.
ValidationResult validate_pipeline_structure(const Pipeline& p, const Registry& registry);

/// Kahn's algorithm with ascending-id tie breaking. Throws on empty or cyclic input.
std::vector<XAppId> topological_order(const Pipeline& p);

/// True iff there is a directed path from `from` to `to` (length >= 1).
bool has_path(const Pipeline& p, const XAppId& from, const XAppId& to);

/// Lowercased, trimmed copy of a directive.
Directive normalize_directive(const Directive& d);

/// Ground-truth equality: nodes (order free, repeats counted), normalized directives and edge set.
/// Conditions are ignored.
bool pipelines_equal(const Pipeline& p, const Pipeline& q);

std::size_t total_nodes(const std::vector<Pipeline>& ps);

// JSON mapping (snake_case field names).
void to_json(Json& j, const XAppProfile& x);
void from_json(const Json& j, XAppProfile& x);
void to_json(Json& j, const Intent& i);
void from_json(const Json& j, Intent& i);
void to_json(Json& j, const DeploymentConditions& c);
void from_json(const Json& j, DeploymentConditions& c);
void to_json(Json& j, const Pipeline& p);
void from_json(const Json& j, Pipeline& p);

/// Strict shape check for deployment conditions; returns problems, empty when valid.
std::vector<std::string> check_conditions_schema(const Json& j);

}  // namespace rapp
