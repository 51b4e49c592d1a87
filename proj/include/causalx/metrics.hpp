#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "causalx/corpus.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/kernels.hpp"

namespace causalx {

// One evaluation unit of the phrase metric: either an ungrouped token or a
// gold cause/effect phrase collapsed onto its root.
struct PhraseUnit {
  std::vector<std::size_t> members;  // ascending token indices
  std::size_t root = 0;              // member whose head lies outside the unit
  Label label = Label::O;            // gold label of the unit
  bool grouped = false;
};

struct PhrasePartition {
  std::vector<PhraseUnit> units;  // ordered by root index
  std::size_t n_tokens = 0;
};

// Dependency relations whose edges join tokens into one phrase.
inline const std::vector<std::string> kDefaultPhraseRelations = {"compound", "amod"};

// Connected components of the undirected graph over compound/amod edges that
// contain a gold C or E token become groups; everything else is a singleton.
// A group's label is its root's gold label when that is not O, otherwise the
// majority non-O member label (ties go to C).
PhrasePartition build_phrase_partition(
    const Sentence& sentence,
    const std::vector<std::string>& relations = kDefaultPhraseRelations);

// One label per unit. A group takes its unit label if any member carries it,
// otherwise its root's label.
std::vector<Label> collapse_labels(std::span<const Label> labels, const PhrasePartition& partition);

enum class MetricMode {
  TokenMicro,   // pooled over C and E
  TokenMacro,   // unweighted mean over C, E, O
  Phrase,       // macro over C, E, O on collapsed units
  PhraseMicro,  // pooled over C and E on collapsed units
};

std::string_view to_string(MetricMode mode);
MetricMode parse_metric_mode(std::string_view text);
bool is_phrase_mode(MetricMode mode);

struct Confusion {
  std::array<std::size_t, kNumLabels> tp{};
  std::array<std::size_t, kNumLabels> fp{};
  std::array<std::size_t, kNumLabels> fn{};

  void add(Label predicted, Label gold);
  Confusion& operator+=(const Confusion& other);
  bool operator==(const Confusion&) const = default;
};

Confusion confusion(std::span<const Label> predicted, std::span<const Label> gold);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool operator==(const Scores&) const = default;
};

// Precision/recall from counts. With nothing predicted and nothing to find all
// three are 1; an undefined ratio otherwise counts as 0.
Scores scores_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct EvalReport {
  MetricMode mode = MetricMode::TokenMacro;
  std::array<Scores, kNumLabels> per_class{};
  Scores aggregate;
  Confusion counts;
  std::size_t units = 0;  // tokens or phrase units scored

  bool operator==(const EvalReport&) const = default;
};

EvalReport make_report(const Confusion& counts, MetricMode mode, std::size_t units);

// Token-level scores; any mode is accepted, the phrase modes are treated as
// their token counterparts here.
EvalReport token_prf(std::span<const Label> predicted, std::span<const Label> gold,
                     MetricMode mode);

// Confusion over collapsed units, phrases from the sentence's gold labels.
Confusion phrase_confusion(std::span<const Label> predicted, const Sentence& sentence);
EvalReport f1_phrase(std::span<const Label> predicted, const Sentence& sentence,
                     MetricMode mode = MetricMode::Phrase);

// Counts pooled over all sentences; one report per requested mode.
std::vector<EvalReport> evaluate_predictions(std::span<const Sentence> sentences,
                                             const std::vector<std::vector<Label>>& predictions,
                                             std::span<const MetricMode> modes);
std::vector<EvalReport> evaluate_predictions(const Corpus& corpus,
                                             const std::vector<std::vector<Label>>& predictions,
                                             std::span<const MetricMode> modes);

struct TrainedTagger;
std::vector<EvalReport> corpus_eval(const TrainedTagger& tagger, const Corpus& corpus,
                                    const EmbeddingStore& store, std::span<const MetricMode> modes,
                                    Execution execution = Execution::Parallel);

// Values rounded to 6 decimal places.
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace causalx
