#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rapp/domain.hpp"

namespace rapp {

/// Raised when a remote embedding backend cannot be reached or answers garbage.
class RetrievalUnavailable : public Error {
public:
  using Error::Error;
};

inline constexpr std::size_t kChunkSize = 500;
inline constexpr std::size_t kChunkOverlap = 50;
inline constexpr std::size_t kEmbeddingDim = 256;

struct EmbeddingVector {
  std::vector<double> components;

  std::size_t dimension() const { return components.size(); }
  bool is_zero() const;
  double norm() const;
};

/// Character span [start, end) in Unicode scalar offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct DocChunk {
  std::string doc_id;
  Span span;
  std::string text;
  EmbeddingVector vector;
};

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Splits into windows of `size` characters advancing by size - overlap. The last window holds the
/// remainder. Vectors are left empty.
std::vector<DocChunk> chunk_document(std::string_view text, std::size_t size = kChunkSize,
                                     std::size_t overlap = kChunkOverlap, std::string doc_id = {});

/// Inverse of chunk_document for chunks produced with the given overlap.
std::string reconstruct_document(const std::vector<DocChunk>& chunks, std::size_t overlap = kChunkOverlap);

/// Inner product of L2-normalised copies; 0 when either side is the zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Retrieval depth per iteration: 10, 20, 30, 40, then 50 forever.
int k_schedule(int iteration);

class Embedder {
public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) = 0;
  virtual std::string name() const = 0;
};

/// Feature hashing of character trigrams into a fixed number of bins, L2-normalised.
class HashedTrigramEmbedder final : public Embedder {
public:
  explicit HashedTrigramEmbedder(std::size_t dim = kEmbeddingDim) : dim_(dim) {}
  EmbeddingVector embed(std::string_view text) override;
  std::string name() const override { return "hashed-trigram-" + std::to_string(dim_); }

private:
  std::size_t dim_;
};

struct RemoteEmbedderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "text-embedding-3-small";
  std::string api_key;
  int timeout_seconds = 30;

  /// RAPP_EMBED_BASE_URL, RAPP_EMBED_MODEL, RAPP_EMBED_API_KEY (falls back to OPENAI_API_KEY).
  static RemoteEmbedderConfig from_env();
};

/// OpenAI-compatible /embeddings client.
class RemoteEmbedder final : public Embedder {
public:
  explicit RemoteEmbedder(RemoteEmbedderConfig cfg) : cfg_(std::move(cfg)) {}
  EmbeddingVector embed(std::string_view text) override;
  std::string name() const override { return "remote:" + cfg_.model; }

private:
  RemoteEmbedderConfig cfg_;
};

/// Cosine scores of every chunk against `query` (OpenMP-parallel).
std::vector<double> score_chunks(const std::vector<DocChunk>& chunks, const EmbeddingVector& query);

namespace reference {
std::vector<double> score_chunks(const std::vector<DocChunk>& chunks, const EmbeddingVector& query);
}  // namespace reference

struct ScoredChunk {
  const DocChunk* chunk = nullptr;
  double score = 0.0;
};

class VectorStore {
public:
  explicit VectorStore(std::shared_ptr<Embedder> embedder);

  void add_document(const std::string& doc_id, std::string_view text);
  /// Loads every regular file in `dir` (sorted by file name) as one document.
  void add_directory(const std::filesystem::path& dir);

  /// Top k_schedule(iteration) chunks; ties by (doc_id, span.start).
  std::vector<ScoredChunk> query(std::string_view query_text, int iteration) const;
  std::vector<ScoredChunk> top_k(std::string_view query_text, std::size_t k) const;

  std::size_t size() const { return chunks_.size(); }
  const std::vector<DocChunk>& chunks() const { return chunks_; }
  Embedder& embedder() const { return *embedder_; }

private:
  std::shared_ptr<Embedder> embedder_;
  std::vector<DocChunk> chunks_;
};

}  // namespace rapp
