#include "causalx/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "causalx/error.hpp"
#include "causalx/train.hpp"

namespace causalx {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void check_length(std::size_t got, std::size_t want, std::string_view what) {
  if (got != want) {
    throw ValidationError(std::string(what) + ": length " + std::to_string(got) +
                          " does not match " + std::to_string(want));
  }
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace

PhrasePartition build_phrase_partition(const Sentence& sentence,
                                       const std::vector<std::string>& relations) {
  validate_sentence(sentence);
  const std::size_t n = sentence.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Token& tok = sentence.tokens[i];
    if (tok.head == kRootHead) continue;
    if (std::find(relations.begin(), relations.end(), tok.rel) == relations.end()) continue;
    const std::size_t a = find_root(parent, i);
    const std::size_t b = find_root(parent, static_cast<std::size_t>(tok.head));
    if (a != b) parent[a] = b;
  }

  std::vector<std::vector<std::size_t>> components(n);
  for (std::size_t i = 0; i < n; ++i) components[find_root(parent, i)].push_back(i);

  PhrasePartition partition;
  partition.n_tokens = n;
  auto singleton = [&](std::size_t i) {
    partition.units.push_back({{i}, i, sentence.labels[i], false});
  };
  for (const auto& members : components) {
    if (members.empty()) continue;
    const bool has_cause_effect = std::any_of(members.begin(), members.end(), [&](std::size_t i) {
      return sentence.labels[i] != Label::O;
    });
    if (members.size() == 1 || !has_cause_effect) {
      for (std::size_t i : members) singleton(i);
      continue;
    }
    PhraseUnit unit;
    unit.members = members;
    unit.grouped = true;
    for (std::size_t i : members) {
      const int h = sentence.tokens[i].head;
      if (h == kRootHead ||
          !std::binary_search(members.begin(), members.end(), static_cast<std::size_t>(h))) {
        unit.root = i;
      }
    }
    const Label root_label = sentence.labels[unit.root];
    if (root_label != Label::O) {
      unit.label = root_label;
    } else {
      std::size_t causes = 0, effects = 0;
      for (std::size_t i : members) {
        causes += sentence.labels[i] == Label::C;
        effects += sentence.labels[i] == Label::E;
      }
      unit.label = effects > causes ? Label::E : Label::C;
    }
    partition.units.push_back(std::move(unit));
  }
  std::sort(partition.units.begin(), partition.units.end(),
            [](const PhraseUnit& a, const PhraseUnit& b) { return a.root < b.root; });
  return partition;
}

std::vector<Label> collapse_labels(std::span<const Label> labels,
                                   const PhrasePartition& partition) {
  check_length(labels.size(), partition.n_tokens, "collapse_labels");
  std::vector<Label> out;
  out.reserve(partition.units.size());
  for (const PhraseUnit& unit : partition.units) {
    if (!unit.grouped) {
      out.push_back(labels[unit.root]);
      continue;
    }
    const bool hit = std::any_of(unit.members.begin(), unit.members.end(),
                                 [&](std::size_t i) { return labels[i] == unit.label; });
    out.push_back(hit ? unit.label : labels[unit.root]);
  }
  return out;
}

std::string_view to_string(MetricMode mode) {
  switch (mode) {
    case MetricMode::TokenMicro: return "TOKEN_MICRO";
    case MetricMode::TokenMacro: return "TOKEN_MACRO";
    case MetricMode::Phrase: return "PHRASE";
    case MetricMode::PhraseMicro: return "PHRASE_MICRO";
  }
  return "?";
}

MetricMode parse_metric_mode(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (MetricMode m : {MetricMode::TokenMicro, MetricMode::TokenMacro, MetricMode::Phrase,
                       MetricMode::PhraseMicro}) {
    if (upper == to_string(m)) return m;
  }
  throw ValidationError("unknown metric mode \"" + std::string(text) +
                        "\" (expected TOKEN_MICRO, TOKEN_MACRO, PHRASE or PHRASE_MICRO)");
}

bool is_phrase_mode(MetricMode mode) {
  return mode == MetricMode::Phrase || mode == MetricMode::PhraseMicro;
}

void Confusion::add(Label predicted, Label gold) {
  if (predicted == gold) {
    ++tp[label_index(gold)];
  } else {
    ++fp[label_index(predicted)];
    ++fn[label_index(gold)];
  }
}

Confusion& Confusion::operator+=(const Confusion& other) {
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    tp[k] += other.tp[k];
    fp[k] += other.fp[k];
    fn[k] += other.fn[k];
  }
  return *this;
}

Confusion confusion(std::span<const Label> predicted, std::span<const Label> gold) {
  check_length(predicted.size(), gold.size(), "predicted labels");
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) c.add(predicted[i], gold[i]);
  return c;
}

Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp + fn == 0) return {1.0, 1.0, 1.0};
  Scores s;
  const double t = static_cast<double>(tp);
  if (tp + fp > 0) s.precision = t / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = t / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

EvalReport make_report(const Confusion& counts, MetricMode mode, std::size_t units) {
  EvalReport r;
  r.mode = mode;
  r.counts = counts;
  r.units = units;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    r.per_class[k] = scores_from_counts(counts.tp[k], counts.fp[k], counts.fn[k]);
  }
  if (mode == MetricMode::TokenMacro || mode == MetricMode::Phrase) {
    for (const Scores& s : r.per_class) {
      r.aggregate.precision += s.precision;
      r.aggregate.recall += s.recall;
      r.aggregate.f1 += s.f1;
    }
    r.aggregate.precision /= kNumLabels;
    r.aggregate.recall /= kNumLabels;
    r.aggregate.f1 /= kNumLabels;
  } else {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (Label l : {Label::C, Label::E}) {
      tp += counts.tp[label_index(l)];
      fp += counts.fp[label_index(l)];
      fn += counts.fn[label_index(l)];
    }
    r.aggregate = scores_from_counts(tp, fp, fn);
  }
  return r;
}

EvalReport token_prf(std::span<const Label> predicted, std::span<const Label> gold,
                     MetricMode mode) {
  if (mode == MetricMode::Phrase) mode = MetricMode::TokenMacro;
  if (mode == MetricMode::PhraseMicro) mode = MetricMode::TokenMicro;
  return make_report(confusion(predicted, gold), mode, gold.size());
}

Confusion phrase_confusion(std::span<const Label> predicted, const Sentence& sentence) {
  check_length(predicted.size(), sentence.size(), "predictions for " + sentence.id);
  const PhrasePartition partition = build_phrase_partition(sentence);
  return confusion(collapse_labels(predicted, partition),
                   collapse_labels(sentence.labels, partition));
}

EvalReport f1_phrase(std::span<const Label> predicted, const Sentence& sentence,
                     MetricMode mode) {
  if (!is_phrase_mode(mode)) {
    throw ValidationError("f1_phrase needs PHRASE or PHRASE_MICRO, got " +
                          std::string(to_string(mode)));
  }
  check_length(predicted.size(), sentence.size(), "predictions for " + sentence.id);
  const PhrasePartition partition = build_phrase_partition(sentence);
  return make_report(confusion(collapse_labels(predicted, partition),
                               collapse_labels(sentence.labels, partition)),
                     mode, partition.units.size());
}

std::vector<EvalReport> evaluate_predictions(std::span<const Sentence> sentences,
                                             const std::vector<std::vector<Label>>& predictions,
                                             std::span<const MetricMode> modes) {
  check_length(predictions.size(), sentences.size(), "prediction list");
  const bool want_phrase = std::any_of(modes.begin(), modes.end(), is_phrase_mode);
  Confusion token_counts, phrase_counts;
  std::size_t n_tokens = 0, n_units = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sentence = sentences[s];
    check_length(predictions[s].size(), sentence.size(), "predictions for " + sentence.id);
    token_counts += confusion(predictions[s], sentence.labels);
    n_tokens += sentence.size();
    if (want_phrase) {
      const PhrasePartition partition = build_phrase_partition(sentence);
      phrase_counts += confusion(collapse_labels(predictions[s], partition),
                                 collapse_labels(sentence.labels, partition));
      n_units += partition.units.size();
    }
  }
  std::vector<EvalReport> reports;
  reports.reserve(modes.size());
  for (MetricMode m : modes) {
    reports.push_back(is_phrase_mode(m) ? make_report(phrase_counts, m, n_units)
                                        : make_report(token_counts, m, n_tokens));
  }
  return reports;
}

std::vector<EvalReport> evaluate_predictions(const Corpus& corpus,
                                             const std::vector<std::vector<Label>>& predictions,
                                             std::span<const MetricMode> modes) {
  return evaluate_predictions(std::span<const Sentence>(corpus.sentences()), predictions, modes);
}

std::vector<EvalReport> corpus_eval(const TrainedTagger& tagger, const Corpus& corpus,
                                    const EmbeddingStore& store, std::span<const MetricMode> modes,
                                    Execution execution) {
  if (store.dim() != tagger.embedding_dim) {
    throw ValidationError("embedding dim " + std::to_string(store.dim()) +
                          " does not match the tagger's " + std::to_string(tagger.embedding_dim));
  }
  const std::vector<Example> examples = make_examples(corpus, store);
  return evaluate_predictions(corpus, predict_all(tagger, examples, execution), modes);
}

nlohmann::json report_to_json(const EvalReport& report) {
  auto scores = [](const Scores& s) {
    return nlohmann::json{{"precision", round6(s.precision)},
                          {"recall", round6(s.recall)},
                          {"f1", round6(s.f1)}};
  };
  nlohmann::json per_class = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (Label l : kAllLabels) {
    const std::size_t k = label_index(l);
    const std::string key(1, label_char(l));
    per_class[key] = scores(report.per_class[k]);
    counts[key] = {{"tp", report.counts.tp[k]},
                   {"fp", report.counts.fp[k]},
                   {"fn", report.counts.fn[k]}};
  }
  return {{"mode", std::string(to_string(report.mode))},
          {"aggregate", scores(report.aggregate)},
          {"per_class", per_class},
          {"counts", counts},
          {"units", report.units}};
}

}  // namespace causalx
