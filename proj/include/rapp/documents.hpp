#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rapp/conflict.hpp"
#include "rapp/domain.hpp"

namespace rapp {

/// Parsed value or the list of reasons it was rejected.
template <class T>
struct Parsed {
  std::optional<T> value;
  std::vector<std::string> errors;

  bool ok() const { return value.has_value(); }
};

/// Conflict report written by the perception role. Records are kept in canonical order.
struct PerceptionDoc {
  std::vector<ConflictRecord> conflicts;
  std::string notes;
  bool operator==(const PerceptionDoc& o) const { return conflicts == o.conflicts && notes == o.notes; }
};

/// Wire form of a pipeline: policy = (selected xApps with directives, edges, deployment conditions).
struct PolicyDoc {
  IntentId intent_id = 0;
  std::vector<PipelineNode> selected_xapps;
  std::vector<Edge> edges;
  DeploymentConditions deployment_conditions;
  bool operator==(const PolicyDoc&) const = default;
};

enum class EditKind { RemoveDuplicate, DropSuperfluous, ReorderStage, ReplaceXApp, AdjustConditions };

std::string to_string(EditKind k);
std::optional<EditKind> edit_kind_from_string(const std::string& s);

struct RefinementEdit {
  EditKind kind;
  std::string rationale;
  bool operator==(const RefinementEdit&) const = default;
};

struct RefinementDoc {
  PolicyDoc revised_policy;
  std::vector<RefinementEdit> edits;
  bool operator==(const RefinementDoc&) const = default;
};

PolicyDoc to_policy_doc(const Pipeline& p);
Pipeline to_pipeline(const PolicyDoc& d);

/// Groups records under actuator / parameter / objective / vendor.
PerceptionDoc perception_from_graph(const ConflictGraph& g, std::string notes = {});

Json to_json(const PerceptionDoc& d);
Json to_json(const PolicyDoc& d);
Json to_json(const RefinementDoc& d);

/// Strips an optional ```json fence and parses. Errors name the parse failure.
Parsed<Json> extract_json(const std::string& text);

/// Strict parsers. Unknown keys, wrong types and unknown xApp ids are errors; structural
/// problems (cycles, stage order, duplicates) are not, they belong to pipeline validation.
Parsed<PerceptionDoc> parse_perception(const std::string& text);
Parsed<PolicyDoc> parse_policy(const Json& j, const Registry& registry, IntentId expected_intent);
Parsed<PolicyDoc> parse_policy(const std::string& text, const Registry& registry, IntentId expected_intent);
Parsed<RefinementDoc> parse_refinement(const std::string& text, const Registry& registry, const PolicyDoc& input);
/// {"policies": [PolicyDoc...]} with exactly one policy per requested intent.
Parsed<std::map<IntentId, PolicyDoc>> parse_single_agent(const std::string& text, const Registry& registry,
                                                         const std::vector<IntentId>& intents);

}  // namespace rapp
