#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "rapp/conflict.hpp"
#include "rapp/documents.hpp"
#include "rapp/domain.hpp"
#include "rapp/transport.hpp"

namespace rapp {

/// Everything a mock backend may consult: fixtures plus the reference pipelines.
struct MockWorld {
  Registry registry;
  IntentCatalog intents;
  VendorCompatibilityMatrix matrix;
  std::map<IntentId, Pipeline> truths;

  /// Synthesizes a reference pipeline for every intent in the catalog.
  static std::shared_ptr<const MockWorld> build(Registry registry, IntentCatalog intents,
                                                VendorCompatibilityMatrix matrix);
};

/// Rule-based review used by both mocks: drop repeated xApps, swap a dialect sibling back for a
/// missing mandatory xApp, drop xApps covering no required capability, then rebuild the chain
/// in stage order. Returns the input untouched (no edits) when nothing applies.
RefinementDoc mechanical_refinement(const PolicyDoc& candidate, const Intent& intent, const Registry& registry);

/// Answers every role exactly: conflict graph for perception, reference pipelines for reasoning.
class OracleMockTransport : public ChatTransport {
public:
  explicit OracleMockTransport(std::shared_ptr<const MockWorld> world) : world_(std::move(world)) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::string descriptor() const override { return "mock-oracle"; }

protected:
  Json perception_answer(const Json& payload) const;
  std::shared_ptr<const MockWorld> world_;
};

/// Seeded imperfect agent. Every random draw is a hash of (seed, purpose, intent, iteration), so
/// the answer is a pure function of the prompt and the seed, and modes sharing a seed see the
/// same draws:
///  - reasoning copies a same-intent analogue when offered one; otherwise it corrupts the
///    reference pipeline with probability kCorruptWithPerception or kCorruptBlind;
///  - perception returns the exact report plus one or two spurious records;
///  - first attempts are truncated (malformed JSON) with probability kMalformed.
class NoisyMockTransport final : public OracleMockTransport {
public:
  static constexpr double kCorruptWithPerception = 0.3;
  static constexpr double kCorruptBlind = 0.7;
  static constexpr double kMalformed = 0.08;

  enum class Corruption { DuplicateNode = 0, ExtraXApp = 1, DroppedEdge = 2, VendorSwap = 3 };

  NoisyMockTransport(std::shared_ptr<const MockWorld> world, std::uint64_t seed)
      : OracleMockTransport(std::move(world)), seed_(seed) {}
  ChatResponse complete(const ChatRequest& request) override;
  std::string descriptor() const override { return "mock-noisy(seed=" + std::to_string(seed_) + ")"; }

  /// Applies one corruption to `truth`, falling back when it cannot apply (see mocks.cpp).
  static Pipeline corrupt(const Pipeline& truth, Corruption kind, std::uint64_t pick, const Intent& intent,
                          const Registry& registry);

private:
  std::uint64_t draw(const std::string& purpose, IntentId intent, int iteration) const;
  Json reasoning_answer(const Json& intent_json, const Json& analogues, bool has_perception, int iteration) const;
  std::uint64_t seed_;
};

}  // namespace rapp
