#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "causalx/corpus.hpp"

namespace causalx {

// Lowercase causal marker patterns, each a sequence of one or more words.
//
// Matching is a contiguous, lowercased token-sequence match. Any pattern word
// from the "cause" family (cause, causes, caused, causing) matches every member
// of that family, so a forbidden "cause" also rejects "causes".
class MarkerLexicon {
 public:
  // Throws ValidationError on an empty pattern list or an empty pattern.
  explicit MarkerLexicon(const std::vector<std::string>& patterns);

  // The lexicon shipped in data/markers.txt.
  static MarkerLexicon defaults();
  // One pattern per line; '#' starts a comment; blank lines ignored.
  static MarkerLexicon parse(std::string_view text);
  static MarkerLexicon load(const std::filesystem::path& path);

  const std::vector<std::vector<std::string>>& patterns() const { return patterns_; }
  std::vector<std::string> pattern_strings() const;

  // True iff some pattern occurs in the sentence.
  bool matches(const Sentence& sentence) const;

 private:
  std::vector<std::vector<std::string>> patterns_;
};

bool is_cause_variant(std::string_view lowercase_word);

// Lexicon-only decision: true = explicit, false = implicit.
bool classify_explicitness(const Sentence& sentence, const MarkerLexicon& lexicon);

// The sentence's own "explicit" annotation when present, otherwise
// classify_explicitness.
bool is_explicit(const Sentence& sentence, const MarkerLexicon& lexicon);

// Uniform seeded sample of n sentences that contain at least one required
// marker and no forbidden marker. Output keeps corpus order.
// Throws ValidationError when the marker sets overlap or fewer than n
// sentences qualify (the message reports the qualifying count).
Corpus subsample_by_marker(const Corpus& corpus, const std::vector<std::string>& required,
                           const std::vector<std::string>& forbidden, std::size_t n,
                           std::uint64_t seed, std::string name = {});

}  // namespace causalx
