#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rapp/domain.hpp"

namespace rapp {

enum class ConflictKind { ActuatorContention = 0, ParameterCoupling = 1, ObjectiveInterference = 2, VendorInterop = 3 };

std::string to_string(ConflictKind k);
ConflictKind conflict_kind_from_string(const std::string& s);

/// (pipeline-ref, xapp) pair. Pipeline refs are intent ids; xapp "*" stands for the rApp as a whole.
struct Participant {
  IntentId rapp = 0;
  XAppId xapp;
  auto operator<=>(const Participant&) const = default;
};

inline constexpr const char* kWholePipeline = "*";

struct ConflictRecord {
  ConflictKind kind = ConflictKind::ActuatorContention;
  std::vector<Participant> participants;  // sorted, unique
  std::string subject;
  std::string explanation;

  /// Identity ignores the explanation text.
  bool operator==(const ConflictRecord& o) const {
    return kind == o.kind && subject == o.subject && participants == o.participants;
  }
};

/// Canonical record order: kind, subject, participants.
bool canonical_less(const ConflictRecord& a, const ConflictRecord& b);
void canonicalize(std::vector<ConflictRecord>& records);

/// Unordered dialect pairs that cannot interoperate on shared resources.
class VendorCompatibilityMatrix {
public:
  void add(const std::string& a, const std::string& b);
  bool incompatible(const std::string& a, const std::string& b) const;
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

/// Read-only lookups every detector needs.
struct ConflictContext {
  const Registry& registry;
  const IntentCatalog& intents;
  const VendorCompatibilityMatrix& matrix;

  const Intent& intent(IntentId id) const;
};

// Cross-pipeline detectors. Preconditions: both pipelines structurally valid, distinct refs.
std::vector<ConflictRecord> detect_actuator_contention(const Pipeline& a, const Pipeline& b);
std::vector<ConflictRecord> detect_parameter_coupling(const Pipeline& a, const Pipeline& b,
                                                      const Registry& registry);
std::vector<ConflictRecord> detect_objective_interference(const Pipeline& a, const Intent& intent_a,
                                                          const Pipeline& b, const Intent& intent_b,
                                                          const Registry& registry);
std::vector<ConflictRecord> detect_vendor_conflicts(const Pipeline& a, const Pipeline& b,
                                                    const Registry& registry,
                                                    const VendorCompatibilityMatrix& m);

// Single-pipeline detectors.
/// Same param written by two xApps of one pipeline with no directed path between them.
std::vector<ConflictRecord> detect_internal_coupling(const Pipeline& p, const Registry& registry);
/// One record per DAG edge whose endpoint dialects are incompatible.
std::vector<ConflictRecord> detect_vendor_conflicts(const Pipeline& p, const Registry& registry,
                                                    const VendorCompatibilityMatrix& m);

/// All four cross detectors between a and b, canonical order.
std::vector<ConflictRecord> pair_conflicts(const Pipeline& a, const Pipeline& b, const ConflictContext& ctx);
/// Internal coupling plus intra-pipeline vendor records, canonical order.
std::vector<ConflictRecord> internal_conflicts(const Pipeline& p, const ConflictContext& ctx);

struct Validity {
  bool valid = true;
  std::vector<ConflictRecord> records;
};

/// V(p | others): false iff p has internal records or any detector fires against a member of others.
Validity validity(const Pipeline& p, const std::vector<Pipeline>& others, const ConflictContext& ctx);

/// Pipelines as vertices, conflict records as edges. Internal conflicts are self-loops (v, v).
struct ConflictGraph {
  std::set<IntentId> vertices;
  std::map<std::pair<IntentId, IntentId>, std::vector<ConflictRecord>> edges;

  std::size_t record_count() const;
  /// Records on the edge between u and v (either order), empty when absent.
  const std::vector<ConflictRecord>& between(IntentId u, IntentId v) const;
  /// Every record whose edge touches v, canonical order.
  std::vector<ConflictRecord> touching(IntentId v) const;
  bool operator==(const ConflictGraph&) const = default;
};

/// Runs every detector over every unordered pair of candidates and pre-deployed pipelines.
/// Pair evaluation is OpenMP-parallel; the result is independent of evaluation order.
ConflictGraph build_conflict_graph(const std::vector<Pipeline>& candidates, const DeploymentState& pre,
                                   const ConflictContext& ctx);

namespace reference {
/// Serial twin of rapp::build_conflict_graph.
ConflictGraph build_conflict_graph(const std::vector<Pipeline>& candidates, const DeploymentState& pre,
                                   const ConflictContext& ctx);
}  // namespace reference

void to_json(Json& j, const ConflictRecord& r);
void from_json(const Json& j, ConflictRecord& r);
void to_json(Json& j, const VendorCompatibilityMatrix& m);
void from_json(const Json& j, VendorCompatibilityMatrix& m);

}  // namespace rapp
