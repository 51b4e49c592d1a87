#include "causalx/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "causalx/error.hpp"
#include "causalx/markers.hpp"
#include "causalx/rng.hpp"

namespace causalx {

namespace {

std::string sentence_tag(const Sentence& s) { return "sentence '" + s.id + "'"; }

template <typename T>
T required_field(const nlohmann::json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ValidationError("line " + std::to_string(line) + ": missing key \"" + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("line " + std::to_string(line) + ": key \"" + key +
                          "\" has the wrong type");
  }
}

Sentence sentence_from_json(const nlohmann::json& record, std::size_t line) {
  if (!record.is_object()) {
    throw ValidationError("line " + std::to_string(line) + ": record is not a JSON object");
  }
  Sentence s;
  s.id = required_field<std::string>(record, "id", line);
  s.dataset = required_field<std::string>(record, "dataset", line);
  const auto surfaces = required_field<std::vector<std::string>>(record, "tokens", line);
  const auto labels = required_field<std::vector<std::string>>(record, "labels", line);
  const auto heads = required_field<std::vector<int>>(record, "heads", line);
  const auto rels = required_field<std::vector<std::string>>(record, "rels", line);
  if (auto it = record.find("explicit"); it != record.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw ValidationError("line " + std::to_string(line) + ": \"explicit\" must be a boolean");
    }
    s.explicit_flag = it->get<bool>();
  }

  const std::size_t n = surfaces.size();
  if (heads.size() != n || rels.size() != n) {
    throw ValidationError("line " + std::to_string(line) + ": " + sentence_tag(s) +
                          " has " + std::to_string(n) + " tokens but " +
                          std::to_string(heads.size()) + " heads and " +
                          std::to_string(rels.size()) + " rels");
  }
  s.tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.tokens.push_back(Token{surfaces[i], heads[i], rels[i]});
  }
  s.labels.reserve(labels.size());
  for (const auto& l : labels) {
    try {
      s.labels.push_back(parse_label(l));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + sentence_tag(s) + ": " +
                            e.what());
    }
  }
  try {
    validate_sentence(s);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line) + ": " + e.what());
  }
  return s;
}

nlohmann::ordered_json sentence_to_json(const Sentence& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["dataset"] = s.dataset;
  std::vector<std::string> surfaces, labels, rels;
  std::vector<int> heads;
  for (const auto& t : s.tokens) {
    surfaces.push_back(t.surface);
    heads.push_back(t.head);
    rels.push_back(t.rel);
  }
  for (Label l : s.labels) labels.emplace_back(1, label_char(l));
  j["tokens"] = surfaces;
  j["labels"] = labels;
  j["heads"] = heads;
  j["rels"] = rels;
  if (s.explicit_flag) j["explicit"] = *s.explicit_flag;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

char label_char(Label l) {
  switch (l) {
    case Label::C: return 'C';
    case Label::E: return 'E';
    case Label::O: return 'O';
  }
  return '?';
}

Label parse_label(std::string_view text) {
  if (text.size() == 1) {
    switch (text[0]) {
      case 'C': case 'c': return Label::C;
      case 'E': case 'e': return Label::E;
      case 'O': case 'o': return Label::O;
      default: break;
    }
  }
  throw ValidationError("unknown label \"" + std::string(text) + "\" (expected C, E or O)");
}

void validate_sentence(const Sentence& s) {
  const std::size_t n = s.tokens.size();
  if (n == 0) throw ValidationError(sentence_tag(s) + " has no tokens");
  if (s.labels.size() != n) {
    throw ValidationError(sentence_tag(s) + ": " + std::to_string(s.labels.size()) +
                          " labels for " + std::to_string(n) + " tokens");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int h = s.tokens[i].head;
    if (h != kRootHead && (h < 0 || static_cast<std::size_t>(h) >= n || static_cast<std::size_t>(h) == i)) {
      throw ValidationError(sentence_tag(s) + ": token " + std::to_string(i) +
                            " has invalid head " + std::to_string(h) + " (valid: -1 or another index in [0, " +
                            std::to_string(n) + "))");
    }
  }
  // 0 = unvisited, 1 = on the current path, 2 = reaches the root.
  std::vector<char> state(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      const int h = s.tokens[cur].head;
      if (h == kRootHead) break;
      cur = static_cast<std::size_t>(h);
    }
    if (state[cur] == 1 && s.tokens[cur].head != kRootHead) {
      throw ValidationError(sentence_tag(s) + ": dependency heads form a cycle through token " +
                            std::to_string(cur));
    }
    for (std::size_t p : path) state[p] = 2;
  }
  const auto roots = std::count_if(s.tokens.begin(), s.tokens.end(),
                                   [](const Token& t) { return t.head == kRootHead; });
  if (roots != 1) {
    throw ValidationError(sentence_tag(s) + " has " + std::to_string(roots) +
                          " roots (expected exactly 1)");
  }
}

Corpus::Corpus(std::string name, std::vector<Sentence> sentences)
    : name_(std::move(name)), sentences_(std::move(sentences)) {
  if (sentences_.empty()) throw ValidationError("corpus '" + name_ + "' is empty");
  std::unordered_set<std::string> seen;
  for (const auto& s : sentences_) {
    validate_sentence(s);
    if (!seen.insert(s.id).second) {
      throw ValidationError("corpus '" + name_ + "': duplicate sentence id '" + s.id + "'");
    }
  }
}

Corpus parse_corpus(std::string_view text, std::string name) {
  std::vector<Sentence> sentences;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    Sentence s = sentence_from_json(record, line_no);
    if (!seen.insert(s.id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate sentence id '" +
                            s.id + "'");
    }
    sentences.push_back(std::move(s));
  }
  if (sentences.empty()) throw ValidationError("corpus contains no records");
  if (name.empty()) name = sentences.front().dataset;
  return Corpus(std::move(name), std::move(sentences));
}

Corpus load_corpus(const std::filesystem::path& path, std::string name) {
  try {
    return parse_corpus(read_file(path), std::move(name));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus) {
    out += sentence_to_json(s).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << serialize_corpus(corpus);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split fraction must lie in (0, 1)");
  }
  // The epsilon keeps products such as 0.7 * 10 from landing just below 7.
  const auto first_size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  const auto order = shuffled_indices(n, seed);
  std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(first_size));
  std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(first_size), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {std::move(first), std::move(second)};
}

Corpus select(const Corpus& corpus, const std::vector<std::size_t>& indices, std::string name) {
  std::vector<Sentence> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(corpus[i]);
  return Corpus(std::move(name), std::move(picked));
}

std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, double train_fraction,
                                           std::uint64_t seed) {
  if (corpus.size() < 2) {
    throw ValidationError("corpus '" + corpus.name() + "' needs at least 2 sentences to split");
  }
  auto [train, test] = split_indices(corpus.size(), train_fraction, seed);
  if (train.empty() || test.empty()) {
    throw ValidationError("split of corpus '" + corpus.name() + "' at fraction " +
                          std::to_string(train_fraction) + " leaves an empty half");
  }
  return {select(corpus, train, corpus.name()), select(corpus, test, corpus.name())};
}

std::vector<LabelSpan> label_spans(const std::vector<Label>& labels) {
  std::vector<LabelSpan> spans;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i] == Label::O) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    spans.push_back(LabelSpan{labels[i], i, j - i});
    i = j;
  }
  return spans;
}

CorpusStats corpus_stats(const Corpus& corpus, const MarkerLexicon& lexicon) {
  CorpusStats stats;
  stats.n_sentences = corpus.size();
  std::size_t implicit = 0;
  std::size_t cause_tokens = 0, cause_spans = 0, effect_tokens = 0, effect_spans = 0;
  for (const auto& s : corpus) {
    if (!is_explicit(s, lexicon)) ++implicit;
    for (const auto& span : label_spans(s.labels)) {
      if (span.label == Label::C) {
        cause_tokens += span.length;
        ++cause_spans;
      } else {
        effect_tokens += span.length;
        ++effect_spans;
      }
    }
  }
  stats.pct_implicit = static_cast<double>(implicit) / static_cast<double>(corpus.size());
  if (cause_spans > 0) {
    stats.mean_cause_len = static_cast<double>(cause_tokens) / static_cast<double>(cause_spans);
  }
  if (effect_spans > 0) {
    stats.mean_effect_len = static_cast<double>(effect_tokens) / static_cast<double>(effect_spans);
  }
  return stats;
}

}  // namespace causalx
