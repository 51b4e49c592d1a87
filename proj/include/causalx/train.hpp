#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "causalx/corpus.hpp"
#include "causalx/decoder.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/kernels.hpp"
#include "causalx/tagger_model.hpp"

namespace causalx {

// A sentence paired with its embedding. Training sets drawn from several
// corpora are plain concatenations of examples.
struct Example {
  const Sentence* sentence = nullptr;
  const EmbeddingMatrix* embedding = nullptr;
};

// Resolves every sentence through lookup(); throws on a missing id or a
// row-count mismatch.
std::vector<Example> make_examples(const Corpus& corpus, const EmbeddingStore& store);

struct Batch {
  std::vector<std::size_t> indices;  // positions in the example list
  std::size_t max_length = 0;
  std::vector<Matrix> inputs;        // each max_length x d, zero-padded
  std::vector<std::vector<Label>> labels;  // each max_length, O-padded
  std::vector<Mask> masks;

  BatchInput view() const;
};

// Per-epoch seeded permutation, cut into consecutive batches.
std::vector<std::vector<std::size_t>> make_batch_plan(std::size_t n_examples,
                                                      std::size_t batch_size,
                                                      std::uint64_t seed, std::size_t epoch);
Batch assemble_batch(std::span<const Example> examples, const std::vector<std::size_t>& indices);
std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t batch_size,
                                std::uint64_t seed, std::size_t epoch);
std::vector<Batch> make_batches(const Corpus& corpus, const EmbeddingStore& store,
                                std::size_t batch_size, std::uint64_t seed, std::size_t epoch);

enum class StopReason { Early, MaxEpochs };
std::string_view to_string(StopReason reason);

// Patience-based stopping that never fires before min_epochs. Epochs are
// 1-based; an improvement is a strictly larger metric.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t min_epochs, std::size_t patience);

  // Records the metric for `epoch`; returns true when training should stop.
  bool observe(std::size_t epoch, double metric);
  bool improved_last() const { return improved_last_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_metric_; }

 private:
  std::size_t min_epochs_;
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_metric_ = 0.0;
  bool improved_last_ = false;
};

struct TrainHistory {
  std::vector<double> train_loss;         // per-token mean, one per epoch
  std::vector<double> validation_metric;  // empty in the fixed-epoch regime
  std::size_t best_epoch = 0;
  std::size_t stop_epoch = 0;
  StopReason stop_reason = StopReason::MaxEpochs;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
};

std::string history_to_json(const TrainHistory& history);

struct TrainedTagger {
  TaggerConfig config;
  TaggerParams params;
  TrainHistory history;
  std::size_t embedding_dim = 0;
};

struct TrainOptions {
  Execution execution = Execution::Parallel;
  std::ostream* progress = nullptr;  // one line per epoch when set
};

// With validation_fraction > 0 a seeded hold-out is monitored with token
// macro-F1 and the best-epoch params are kept; with 0 exactly max_epochs run
// and the final params are kept. An input_dim of 0 is taken from the embeddings.
TrainedTagger train_tagger(const TaggerConfig& config, const Corpus& train_corpus,
                           const EmbeddingStore& store, double validation_fraction,
                           const TrainOptions& options = {});
// train_tagger over an explicit example list.
TrainedTagger train_with_holdout(const TaggerConfig& config, std::span<const Example> examples,
                                 double validation_fraction, const TrainOptions& options = {});
TrainedTagger train_on_examples(const TaggerConfig& config, std::span<const Example> train,
                                std::span<const Example> validation,
                                const TrainOptions& options = {});

// Linear decoder: per-token argmax. CRF decoder: Viterbi.
std::vector<Label> predict(const TrainedTagger& tagger, const Sentence& sentence,
                           const EmbeddingStore& store);
std::vector<std::vector<Label>> predict_all(const TrainedTagger& tagger,
                                            std::span<const Example> examples,
                                            Execution execution = Execution::Parallel);

}  // namespace causalx
