#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causalx {

// Cause / Effect / Other. The numeric order is the fixed iteration order.
enum class Label : std::uint8_t { C = 0, E = 1, O = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {Label::C, Label::E, Label::O};

constexpr std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }
char label_char(Label l);
// Accepts "C", "E", "O" (case-insensitive). Throws ValidationError otherwise.
Label parse_label(std::string_view text);

inline constexpr int kRootHead = -1;

// A token's index is its position in Sentence::tokens.
struct Token {
  std::string surface;
  int head = kRootHead;  // 0-based index of the dependency head, kRootHead for the root
  std::string rel;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string id;
  std::string dataset;
  std::vector<Token> tokens;
  std::vector<Label> labels;
  std::optional<bool> explicit_flag;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

// Throws ValidationError if lengths disagree, a head is out of range, the
// sentence has zero or several roots, or the head graph has a cycle.
void validate_sentence(const Sentence& sentence);

// Nonempty, validated, ids distinct. Immutable once built.
class Corpus {
 public:
  Corpus(std::string name, std::vector<Sentence> sentences);

  const std::string& name() const { return name_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  std::size_t size() const { return sentences_.size(); }
  const Sentence& operator[](std::size_t i) const { return sentences_[i]; }
  auto begin() const { return sentences_.begin(); }
  auto end() const { return sentences_.end(); }

  bool operator==(const Corpus&) const = default;

 private:
  std::string name_;
  std::vector<Sentence> sentences_;
};

// Newline-delimited JSON, one sentence per line. When `name` is empty the
// corpus takes the dataset field of its first record. Errors carry the
// 1-based line number.
Corpus parse_corpus(std::string_view text, std::string name = {});
Corpus load_corpus(const std::filesystem::path& path, std::string name = {});
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Seeded partition of 0..n-1: the first floor(fraction * n) indices of a
// Fisher-Yates permutation go to the first half. Both halves are returned
// in ascending index order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed);

// Sentences keep their original relative order within each half. Requires at
// least 2 sentences and a fraction that leaves both halves nonempty.
std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, double train_fraction,
                                           std::uint64_t seed);

// Copies the selected sentences (in the given order) into a new corpus.
Corpus select(const Corpus& corpus, const std::vector<std::size_t>& indices, std::string name);

// A maximal run of identical non-O labels.
struct LabelSpan {
  Label label = Label::O;
  std::size_t begin = 0;
  std::size_t length = 0;
};
std::vector<LabelSpan> label_spans(const std::vector<Label>& labels);

struct CorpusStats {
  std::size_t n_sentences = 0;
  double pct_implicit = 0.0;  // fraction in [0, 1]
  double mean_cause_len = 0.0;
  double mean_effect_len = 0.0;
};

class MarkerLexicon;
CorpusStats corpus_stats(const Corpus& corpus, const MarkerLexicon& lexicon);

}  // namespace causalx
