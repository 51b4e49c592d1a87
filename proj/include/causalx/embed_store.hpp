#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/corpus.hpp"

namespace causalx {

// Row-major rows x dim block of 32-bit floats, row i = token i.
struct EmbeddingMatrix {
  std::string sentence_id;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  float at(std::size_t r, std::size_t c) const { return values[r * dim + c]; }
  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(values).subspan(r * dim, dim);
  }
  bool operator==(const EmbeddingMatrix&) const = default;
};

// Precomputed contextual embeddings keyed by sentence id, uniform dim.
// Iteration is in ascending bytewise id order.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  // Throws ValidationError on a duplicate id, wrong dim, size mismatch or a
  // non-finite value.
  void insert(EmbeddingMatrix matrix);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  const EmbeddingMatrix* find(std::string_view id) const;
  const std::map<std::string, EmbeddingMatrix, std::less<>>& entries() const { return entries_; }

  bool operator==(const EmbeddingStore&) const = default;

 private:
  std::size_t dim_;
  std::map<std::string, EmbeddingMatrix, std::less<>> entries_;
};

// CEMB v1, little-endian throughout:
//   "CEMB" | u32 version=1 | u32 dim | u64 count |
//   count x ( u16 id_len | id bytes | u32 T | T*dim f32 row-major )
inline constexpr std::uint32_t kCembVersion = 1;

EmbeddingStore read_embedding_file(std::string_view bytes);
std::string write_embedding_file(const EmbeddingStore& store);
EmbeddingStore load_embedding_file(const std::filesystem::path& path);
void save_embedding_file(const EmbeddingStore& store, const std::filesystem::path& path);

// Throws ValidationError naming the id when it is missing, or both counts
// when the stored row count differs from the sentence length.
const EmbeddingMatrix& lookup(const EmbeddingStore& store, const Sentence& sentence);

// Deterministic stand-in for contextual embeddings: every lowercase word form
// maps to a fixed vector in [-1, 1]^dim derived from (seed, word).
EmbeddingStore hash_embeddings(const Corpus& corpus, std::size_t dim, std::uint64_t seed);
std::vector<float> hash_word_vector(std::string_view word, std::size_t dim, std::uint64_t seed);

}  // namespace causalx
