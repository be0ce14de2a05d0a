#include "rapp/memory.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace rapp {

MemoryKernel::MemoryKernel(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {
  if (!embedder_) throw Error("MemoryKernel needs an embedder");
}

void MemoryKernel::clear() {
  entries_.clear();
  last_seq_ = 0;
}

void MemoryKernel::record(MemoryEntry entry) {
  if (entry.sequence_no == 0) {
    entry.sequence_no = last_seq_ + 1;
  } else if (entry.sequence_no <= last_seq_) {
    throw Error("memory: sequence_no " + std::to_string(entry.sequence_no) + " not above " +
                std::to_string(last_seq_));
  }
  last_seq_ = entry.sequence_no;
  entries_.push_back(std::move(entry));
}

std::vector<Analogue> MemoryKernel::retrieve_analogues(const Intent& intent, std::size_t k) const {
  if (k == 0) return {};
  struct Ranked {
    const MemoryEntry* e;
    bool same;
    double sim;
  };
  const auto query = embedder_->embed(intent.text);
  std::map<std::string, EmbeddingVector> cache;
  std::vector<Ranked> pool;
  for (const auto& e : entries_) {
    if (!e.outcome.correct) continue;
    auto it = cache.find(e.intent.text);
    if (it == cache.end()) it = cache.emplace(e.intent.text, embedder_->embed(e.intent.text)).first;
    pool.push_back({&e, e.intent.id == intent.id, cosine(query, it->second)});
  }
  std::sort(pool.begin(), pool.end(), [](const Ranked& a, const Ranked& b) {
    return std::tuple{a.same, a.sim, a.e->sequence_no} > std::tuple{b.same, b.sim, b.e->sequence_no};
  });

  // Repeated successes of the same policy add nothing to a few-shot prompt.
  std::vector<Analogue> out;
  for (const auto& r : pool) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Analogue& a) {
      return a.intent.id == r.e->intent.id && pipelines_equal(a.pipeline, r.e->pipeline);
    });
    if (seen) continue;
    out.push_back({r.e->intent, r.e->pipeline});
    if (out.size() == k) break;
  }
  return out;
}

std::string MemoryKernel::failure_summary(const Intent& intent) const {
  std::map<std::pair<ConflictKind, XAppId>, int> groups;
  int failures = 0, mismatches = 0;
  for (const auto& e : entries_) {
    if (e.intent.id != intent.id || (e.outcome.deployed && e.outcome.correct)) continue;
    ++failures;
    std::set<std::pair<ConflictKind, XAppId>> cited;
    for (const auto& r : e.outcome.conflicts)
      for (const auto& p : r.participants)
        if (p.rapp == intent.id) cited.insert({r.kind, p.xapp});
    if (cited.empty()) ++mismatches;
    for (const auto& g : cited) ++groups[g];
  }
  if (failures == 0) return kNoPriorFailures;

  std::vector<std::pair<std::pair<ConflictKind, XAppId>, int>> rows(groups.begin(), groups.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::ostringstream os;
  os << "Prior failures for intent " << intent.id << ": " << failures << " attempt(s).\n";
  for (const auto& [g, n] : rows) {
    const auto& [kind, xapp] = g;
    os << "- " << to_string(kind) << " involving "
       << (xapp == kWholePipeline ? std::string("the pipeline as a whole") : xapp) << ": " << n << " time(s)\n";
  }
  if (mismatches > 0)
    os << "- pipeline differed from the reference without any detected conflict: " << mismatches << " time(s)\n";
  return os.str();
}

std::string MemoryKernel::to_jsonl() const {
  std::string out;
  for (const auto& e : entries_) out += Json(e).dump() + "\n";
  return out;
}

void MemoryKernel::from_jsonl(const std::string& text) {
  clear();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      record(Json::parse(line).get<MemoryEntry>());
    } catch (const nlohmann::json::exception& ex) {
      throw Error("memory buffer line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
}

void MemoryKernel::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << to_jsonl();
}

void MemoryKernel::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  from_jsonl(ss.str());
}

void to_json(Json& j, const OutcomeRecord& o) {
  j = Json{{"deployed", o.deployed},
           {"correct", o.correct},
           {"conflicts", o.conflicts},
           {"iteration", o.iteration},
           {"score", o.score}};
}

void from_json(const Json& j, OutcomeRecord& o) {
  o.deployed = j.at("deployed").get<bool>();
  o.correct = j.at("correct").get<bool>();
  o.conflicts = j.at("conflicts").get<std::vector<ConflictRecord>>();
  o.iteration = j.at("iteration").get<int>();
  o.score = j.at("score").get<SolutionScore>();
}

void to_json(Json& j, const MemoryEntry& e) {
  j = Json{{"sequence_no", e.sequence_no}, {"intent", e.intent}, {"pipeline", e.pipeline}, {"outcome", e.outcome}};
}

void from_json(const Json& j, MemoryEntry& e) {
  e.sequence_no = j.at("sequence_no").get<std::uint64_t>();
  e.intent = j.at("intent").get<Intent>();
  e.pipeline = j.at("pipeline").get<Pipeline>();
  e.outcome = j.at("outcome").get<OutcomeRecord>();
}

}  // namespace rapp
