#include "causalx/embed_store.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "causalx/error.hpp"
#include "causalx/rng.hpp"

namespace causalx {

namespace detail {

std::string read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_binary_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw RuntimeFailure("short write to " + path);
}

}  // namespace detail

namespace {
constexpr std::string_view kMagic = "CEMB";
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ValidationError("embedding dim must be positive");
}

void EmbeddingStore::insert(EmbeddingMatrix m) {
  if (m.dim != dim_) {
    throw ValidationError("embedding for '" + m.sentence_id + "' has dim " +
                          std::to_string(m.dim) + ", store dim is " + std::to_string(dim_));
  }
  if (m.values.size() != m.rows * m.dim) {
    throw ValidationError("embedding for '" + m.sentence_id + "' has " +
                          std::to_string(m.values.size()) + " values for " +
                          std::to_string(m.rows) + " x " + std::to_string(m.dim));
  }
  if (m.sentence_id.size() > 0xffff) {
    throw ValidationError("sentence id longer than 65535 bytes");
  }
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (!std::isfinite(m.values[i])) {
      throw ValidationError("embedding for '" + m.sentence_id + "' has a non-finite value at row " +
                            std::to_string(i / m.dim) + ", column " + std::to_string(i % m.dim));
    }
  }
  if (entries_.find(m.sentence_id) != entries_.end()) {
    throw ValidationError("duplicate embedding id '" + m.sentence_id + "'");
  }
  std::string id = m.sentence_id;
  entries_.emplace(std::move(id), std::move(m));
}

const EmbeddingMatrix* EmbeddingStore::find(std::string_view id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

EmbeddingStore read_embedding_file(std::string_view bytes) {
  detail::ByteReader in(bytes, "CEMB file");
  if (bytes.size() < 4) throw ValidationError("CEMB file: truncated header");
  if (in.bytes(4) != kMagic) {
    throw ValidationError("CEMB file: bad magic (expected \"CEMB\")");
  }
  const std::uint32_t version = in.u32();
  if (version != kCembVersion) {
    throw ValidationError("CEMB file: unsupported version " + std::to_string(version));
  }
  const std::uint32_t dim = in.u32();
  const std::uint64_t count = in.u64();
  EmbeddingStore store(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    EmbeddingMatrix m;
    const std::uint16_t id_len = in.u16();
    m.sentence_id = std::string(in.bytes(id_len));
    m.rows = in.u32();
    m.dim = dim;
    const std::size_t n = m.rows * m.dim;
    if (in.remaining() / 4 < n) {
      throw ValidationError("CEMB file: record '" + m.sentence_id + "' is truncated");
    }
    m.values.resize(n);
    for (auto& v : m.values) v = in.f32();
    if (store.find(m.sentence_id) != nullptr) {
      throw ValidationError("CEMB file: duplicate id '" + m.sentence_id + "'");
    }
    store.insert(std::move(m));
  }
  if (in.remaining() != 0) {
    throw ValidationError("CEMB file: " + std::to_string(in.remaining()) +
                          " trailing bytes after the last record");
  }
  return store;
}

std::string write_embedding_file(const EmbeddingStore& store) {
  detail::ByteWriter out;
  out.bytes(kMagic);
  out.u32(kCembVersion);
  out.u32(static_cast<std::uint32_t>(store.dim()));
  out.u64(store.size());
  for (const auto& [id, m] : store.entries()) {
    out.u16(static_cast<std::uint16_t>(id.size()));
    out.bytes(id);
    out.u32(static_cast<std::uint32_t>(m.rows));
    for (float v : m.values) out.f32(v);
  }
  return out.take();
}

EmbeddingStore load_embedding_file(const std::filesystem::path& path) {
  try {
    return read_embedding_file(detail::read_binary_file(path.string()));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_embedding_file(const EmbeddingStore& store, const std::filesystem::path& path) {
  detail::write_binary_file(path.string(), write_embedding_file(store));
}

const EmbeddingMatrix& lookup(const EmbeddingStore& store, const Sentence& sentence) {
  const EmbeddingMatrix* m = store.find(sentence.id);
  if (m == nullptr) {
    throw ValidationError("no embedding for sentence '" + sentence.id + "'");
  }
  if (m->rows != sentence.size()) {
    throw ValidationError("embedding for sentence '" + sentence.id + "' has " +
                          std::to_string(m->rows) + " rows but the sentence has " +
                          std::to_string(sentence.size()) + " tokens");
  }
  return *m;
}

std::vector<float> hash_word_vector(std::string_view word, std::size_t dim, std::uint64_t seed) {
  std::string lowered(word);
  for (auto& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  Rng rng(hash_string(lowered, seed));
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

EmbeddingStore hash_embeddings(const Corpus& corpus, std::size_t dim, std::uint64_t seed) {
  EmbeddingStore store(dim);
  for (const auto& s : corpus) {
    EmbeddingMatrix m;
    m.sentence_id = s.id;
    m.rows = s.size();
    m.dim = dim;
    m.values.reserve(m.rows * dim);
    for (const auto& t : s.tokens) {
      const auto row = hash_word_vector(t.surface, dim, seed);
      m.values.insert(m.values.end(), row.begin(), row.end());
    }
    store.insert(std::move(m));
  }
  return store;
}

}  // namespace causalx
