#include "causalx/markers.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "causalx/error.hpp"
#include "causalx/rng.hpp"

namespace causalx {

namespace {

// Keep in sync with data/markers.txt.
constexpr const char* kDefaultMarkers[] = {
    "cause",   "causes",   "caused",         "causing",    "leads to", "lead to",
    "due to",  "because",  "because of",     "trigger",    "triggers", "triggered",
    "as a result of",      "results in",     "result of",  "associates",
    "associated with",
};

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

std::vector<std::string> split_words(std::string_view pattern) {
  std::vector<std::string> words;
  std::istringstream in{std::string(pattern)};
  std::string w;
  while (in >> w) words.push_back(ascii_lower(w));
  return words;
}

bool word_matches(const std::string& pattern_word, const std::string& token) {
  if (is_cause_variant(pattern_word)) return is_cause_variant(token);
  return pattern_word == token;
}

bool contains_pattern(const std::vector<std::string>& lowered,
                      const std::vector<std::string>& pattern) {
  if (pattern.size() > lowered.size()) return false;
  for (std::size_t start = 0; start + pattern.size() <= lowered.size(); ++start) {
    bool ok = true;
    for (std::size_t k = 0; k < pattern.size() && ok; ++k) {
      ok = word_matches(pattern[k], lowered[start + k]);
    }
    if (ok) return true;
  }
  return false;
}

std::vector<std::string> lowered_tokens(const Sentence& sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) out.push_back(ascii_lower(t.surface));
  return out;
}

}  // namespace

bool is_cause_variant(std::string_view w) {
  return w == "cause" || w == "causes" || w == "caused" || w == "causing";
}

MarkerLexicon::MarkerLexicon(const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) {
    auto words = split_words(p);
    if (words.empty()) throw ValidationError("marker lexicon contains an empty pattern");
    if (std::find(patterns_.begin(), patterns_.end(), words) == patterns_.end()) {
      patterns_.push_back(std::move(words));
    }
  }
  if (patterns_.empty()) throw ValidationError("marker lexicon is empty");
}

MarkerLexicon MarkerLexicon::defaults() {
  return MarkerLexicon(std::vector<std::string>(std::begin(kDefaultMarkers), std::end(kDefaultMarkers)));
}

MarkerLexicon MarkerLexicon::parse(std::string_view text) {
  std::vector<std::string> patterns;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    patterns.push_back(line);
  }
  return MarkerLexicon(patterns);
}

MarkerLexicon MarkerLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open marker lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::string> MarkerLexicon::pattern_strings() const {
  std::vector<std::string> out;
  for (const auto& words : patterns_) {
    std::string joined;
    for (const auto& w : words) {
      if (!joined.empty()) joined += ' ';
      joined += w;
    }
    out.push_back(joined);
  }
  return out;
}

bool MarkerLexicon::matches(const Sentence& sentence) const {
  const auto lowered = lowered_tokens(sentence);
  return std::any_of(patterns_.begin(), patterns_.end(),
                     [&](const auto& p) { return contains_pattern(lowered, p); });
}

bool classify_explicitness(const Sentence& sentence, const MarkerLexicon& lexicon) {
  return lexicon.matches(sentence);
}

bool is_explicit(const Sentence& sentence, const MarkerLexicon& lexicon) {
  if (sentence.explicit_flag) return *sentence.explicit_flag;
  return classify_explicitness(sentence, lexicon);
}

Corpus subsample_by_marker(const Corpus& corpus, const std::vector<std::string>& required,
                           const std::vector<std::string>& forbidden, std::size_t n,
                           std::uint64_t seed, std::string name) {
  const MarkerLexicon req(required);
  std::vector<std::vector<std::string>> forbid;
  for (const auto& f : forbidden) {
    auto words = split_words(f);
    if (words.empty()) throw ValidationError("forbidden marker set contains an empty pattern");
    if (std::find(req.patterns().begin(), req.patterns().end(), words) != req.patterns().end()) {
      throw ValidationError("marker '" + f + "' is both required and forbidden");
    }
    forbid.push_back(std::move(words));
  }
  if (n == 0) throw ValidationError("subsample size must be positive");

  std::vector<std::size_t> qualifying;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto lowered = lowered_tokens(corpus[i]);
    const bool has_required = std::any_of(req.patterns().begin(), req.patterns().end(),
                                          [&](const auto& p) { return contains_pattern(lowered, p); });
    const bool has_forbidden = std::any_of(forbid.begin(), forbid.end(),
                                           [&](const auto& p) { return contains_pattern(lowered, p); });
    if (has_required && !has_forbidden) qualifying.push_back(i);
  }
  if (qualifying.size() < n) {
    throw ValidationError("only " + std::to_string(qualifying.size()) +
                          " sentences qualify for the marker subsample, " + std::to_string(n) +
                          " requested");
  }
  Rng rng(seed);
  rng.shuffle(qualifying);
  qualifying.resize(n);
  std::sort(qualifying.begin(), qualifying.end());
  return select(corpus, qualifying, name.empty() ? corpus.name() : std::move(name));
}

}  // namespace causalx
