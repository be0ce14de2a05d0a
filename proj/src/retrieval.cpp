#include "rapp/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "http_util.hpp"

namespace rapp {

bool EmbeddingVector::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](double v) { return v == 0.0; });
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : components) s += v * v;
  return std::sqrt(s);
}

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::vector<DocChunk> chunk_document(std::string_view text, std::size_t size, std::size_t overlap,
                                     std::string doc_id) {
  if (size == 0 || overlap >= size) throw Error("chunk_document: need 0 <= overlap < size");
  const std::u32string chars = decode_utf8(text);
  std::vector<DocChunk> out;
  if (chars.empty()) return out;
  const std::size_t stride = size - overlap;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + size, chars.size());
    DocChunk c;
    c.doc_id = doc_id;
    c.span = {start, end};
    c.text = encode_utf8(std::u32string_view(chars).substr(start, end - start));
    out.push_back(std::move(c));
    if (end == chars.size()) break;
  }
  return out;
}

std::string reconstruct_document(const std::vector<DocChunk>& chunks, std::size_t overlap) {
  std::u32string out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    auto chars = decode_utf8(chunks[i].text);
    out += i == 0 ? chars : chars.substr(std::min(overlap, chars.size()));
  }
  return encode_utf8(out);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw Error("cosine: dimension mismatch (" + std::to_string(a.dimension()) + " vs " +
                std::to_string(b.dimension()) + ")");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) dot += a.components[i] * b.components[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

int k_schedule(int iteration) {
  if (iteration < 1) throw Error("k_schedule: iteration must be >= 1");
  return std::min(10 + 10 * (iteration - 1), 50);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void normalize(EmbeddingVector& v) {
  const double n = v.norm();
  if (n == 0.0) return;
  for (double& x : v.components) x /= n;
}

}  // namespace

EmbeddingVector HashedTrigramEmbedder::embed(std::string_view text) {
  EmbeddingVector v;
  v.components.assign(dim_, 0.0);
  std::u32string chars = decode_utf8(text);
  if (chars.empty()) return v;
  for (auto& c : chars)
    if (c < 0x80) c = static_cast<char32_t>(std::tolower(static_cast<int>(c)));
  const std::u32string padded = U" " + chars + U" ";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const auto gram = encode_utf8(std::u32string_view(padded).substr(i, 3));
    v.components[fnv1a(gram) % dim_] += 1.0;
  }
  normalize(v);
  return v;
}

RemoteEmbedderConfig RemoteEmbedderConfig::from_env() {
  RemoteEmbedderConfig c;
  if (const char* v = std::getenv("RAPP_EMBED_BASE_URL")) c.base_url = v;
  if (const char* v = std::getenv("RAPP_EMBED_MODEL")) c.model = v;
  if (const char* v = std::getenv("RAPP_EMBED_API_KEY")) c.api_key = v;
  else if (const char* k = std::getenv("OPENAI_API_KEY")) c.api_key = k;
  return c;
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) {
  EmbeddingVector v;
  if (text.empty()) return v;
  Json body{{"model", cfg_.model}, {"input", std::string(text)}};
  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
  detail::HttpReply reply;
  try {
    reply = detail::post_json(cfg_.base_url, "/embeddings", body.dump(), headers, cfg_.timeout_seconds);
  } catch (const std::exception& e) {
    throw RetrievalUnavailable(e.what());
  }
  if (reply.status != 200)
    throw RetrievalUnavailable("embedding endpoint answered HTTP " + std::to_string(reply.status));
  try {
    auto j = Json::parse(reply.body);
    v.components = j.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw RetrievalUnavailable(std::string("malformed embedding response: ") + e.what());
  }
  normalize(v);
  return v;
}

std::vector<double> score_chunks(const std::vector<DocChunk>& chunks, const EmbeddingVector& query) {
  std::vector<double> scores(chunks.size(), 0.0);
  for (const auto& c : chunks)
    if (c.vector.dimension() != query.dimension()) throw Error("score_chunks: dimension mismatch");
  const auto n = static_cast<std::int64_t>(chunks.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) scores[static_cast<std::size_t>(i)] = cosine(chunks[i].vector, query);
  return scores;
}

namespace reference {
std::vector<double> score_chunks(const std::vector<DocChunk>& chunks, const EmbeddingVector& query) {
  std::vector<double> scores;
  scores.reserve(chunks.size());
  for (const auto& c : chunks) scores.push_back(cosine(c.vector, query));
  return scores;
}
}  // namespace reference

VectorStore::VectorStore(std::shared_ptr<Embedder> embedder) : embedder_(std::move(embedder)) {
  if (!embedder_) throw Error("VectorStore needs an embedder");
}

void VectorStore::add_document(const std::string& doc_id, std::string_view text) {
  for (auto& c : chunk_document(text, kChunkSize, kChunkOverlap, doc_id)) {
    c.vector = embedder_->embed(c.text);
    chunks_.push_back(std::move(c));
  }
}

void VectorStore::add_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    add_document(f.filename().string(), ss.str());
  }
}

std::vector<ScoredChunk> VectorStore::top_k(std::string_view query_text, std::size_t k) const {
  const auto q = embedder_->embed(query_text);
  std::vector<ScoredChunk> ranked;
  if (chunks_.empty()) return ranked;
  const auto scores = score_chunks(chunks_, q);
  ranked.reserve(chunks_.size());
  for (std::size_t i = 0; i < chunks_.size(); ++i) ranked.push_back({&chunks_[i], scores[i]});
  std::sort(ranked.begin(), ranked.end(), [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chunk->doc_id != b.chunk->doc_id) return a.chunk->doc_id < b.chunk->doc_id;
    return a.chunk->span.start < b.chunk->span.start;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<ScoredChunk> VectorStore::query(std::string_view query_text, int iteration) const {
  return top_k(query_text, static_cast<std::size_t>(k_schedule(iteration)));
}

}  // namespace rapp
