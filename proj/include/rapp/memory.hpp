#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rapp/conflict.hpp"
#include "rapp/domain.hpp"
#include "rapp/planner.hpp"
#include "rapp/retrieval.hpp"

namespace rapp {

struct OutcomeRecord {
  bool deployed = false;
  bool correct = false;  // pipeline equaled the ground truth when recorded
  std::vector<ConflictRecord> conflicts;
  int iteration = 0;
  SolutionScore score;
};

struct MemoryEntry {
  Intent intent;
  Pipeline pipeline;
  OutcomeRecord outcome;
  std::uint64_t sequence_no = 0;
};

struct Analogue {
  Intent intent;
  Pipeline pipeline;
};

inline constexpr const char* kNoPriorFailures = "No prior failures recorded for this intent.";

/// Append-only episodic buffer. One writer at a time; callers serialise writes.
class MemoryKernel {
public:
  explicit MemoryKernel(std::shared_ptr<Embedder> embedder);

  void clear();
  /// Appends. sequence_no 0 means "assign the next one"; an explicit value must exceed the last.
  void record(MemoryEntry entry);

  std::size_t size() const { return entries_.size(); }
  const std::vector<MemoryEntry>& entries() const { return entries_; }

  /// Up to k successful entries: same intent id first, then by cosine similarity of intent text,
  /// then newest first.
  std::vector<Analogue> retrieve_analogues(const Intent& intent, std::size_t k) const;

  /// Templated digest of this intent's failed entries (exact id match).
  std::string failure_summary(const Intent& intent) const;

  void save(const std::filesystem::path& file) const;
  void load(const std::filesystem::path& file);
  std::string to_jsonl() const;
  void from_jsonl(const std::string& text);

private:
  std::shared_ptr<Embedder> embedder_;
  std::vector<MemoryEntry> entries_;
  std::uint64_t last_seq_ = 0;
};

void to_json(Json& j, const OutcomeRecord& o);
void from_json(const Json& j, OutcomeRecord& o);
void to_json(Json& j, const MemoryEntry& e);
void from_json(const Json& j, MemoryEntry& e);

}  // namespace rapp
