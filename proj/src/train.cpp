#include "causalx/train.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "causalx/adam.hpp"
#include "causalx/error.hpp"
#include "causalx/metrics.hpp"
#include "causalx/rng.hpp"

namespace causalx {

namespace {
constexpr std::uint64_t kValidationSalt = 0x76616c6964ULL;
}

std::string_view to_string(StopReason reason) {
  return reason == StopReason::Early ? "early" : "max_epochs";
}

std::vector<Example> make_examples(const Corpus& corpus, const EmbeddingStore& store) {
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(Example{&s, &lookup(store, s)});
  return out;
}

BatchInput Batch::view() const {
  BatchInput in;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::size_t len = 0;
    while (len < masks[i].size() && masks[i][len]) ++len;
    in.inputs.push_back(&inputs[i]);
    in.labels.emplace_back(labels[i].data(), len);
  }
  return in;
}

std::vector<std::vector<std::size_t>> make_batch_plan(std::size_t n_examples, std::size_t batch_size,
                                                      std::uint64_t seed, std::size_t epoch) {
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  const auto order = shuffled_indices(n_examples, mix_seed(seed, epoch));
  std::vector<std::vector<std::size_t>> plan;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    plan.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                      order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

Batch assemble_batch(std::span<const Example> examples, const std::vector<std::size_t>& indices) {
  Batch b;
  b.indices = indices;
  for (std::size_t i : indices) {
    const Example& ex = examples[i];
    if (ex.embedding == nullptr || ex.sentence == nullptr) {
      throw ValidationError("example " + std::to_string(i) + " has no embedding");
    }
    b.max_length = std::max(b.max_length, ex.sentence->size());
  }
  for (std::size_t i : indices) {
    const Example& ex = examples[i];
    const std::size_t len = ex.sentence->size();
    b.inputs.push_back(to_matrix(*ex.embedding, static_cast<Eigen::Index>(b.max_length)));
    std::vector<Label> labels(b.max_length, Label::O);
    std::copy(ex.sentence->labels.begin(), ex.sentence->labels.end(), labels.begin());
    b.labels.push_back(std::move(labels));
    b.masks.push_back(prefix_mask(len, b.max_length));
  }
  return b;
}

std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t batch_size,
                                std::uint64_t seed, std::size_t epoch) {
  std::vector<Batch> out;
  for (const auto& idx : make_batch_plan(examples.size(), batch_size, seed, epoch)) {
    out.push_back(assemble_batch(examples, idx));
  }
  return out;
}

std::vector<Batch> make_batches(const Corpus& corpus, const EmbeddingStore& store,
                                std::size_t batch_size, std::uint64_t seed, std::size_t epoch) {
  const auto examples = make_examples(corpus, store);
  return make_batches(examples, batch_size, seed, epoch);
}

EarlyStopping::EarlyStopping(std::size_t min_epochs, std::size_t patience)
    : min_epochs_(min_epochs), patience_(patience) {
  if (patience == 0) throw ValidationError("patience must be positive");
}

bool EarlyStopping::observe(std::size_t epoch, double metric) {
  improved_last_ = best_epoch_ == 0 || metric > best_metric_;
  if (improved_last_) {
    best_epoch_ = epoch;
    best_metric_ = metric;
  }
  return epoch >= min_epochs_ && epoch - best_epoch_ >= patience_;
}

std::string history_to_json(const TrainHistory& h) {
  nlohmann::ordered_json j;
  j["train_loss"] = h.train_loss;
  j["validation_metric"] = h.validation_metric;
  j["best_epoch"] = h.best_epoch;
  j["stop_epoch"] = h.stop_epoch;
  j["stop_reason"] = std::string(to_string(h.stop_reason));
  j["n_train"] = h.n_train;
  j["n_validation"] = h.n_validation;
  return j.dump(2) + "\n";
}

TrainedTagger train_on_examples(const TaggerConfig& requested, std::span<const Example> train,
                                std::span<const Example> validation, const TrainOptions& options) {
  if (train.empty()) throw ValidationError("training set is empty");
  TaggerConfig config = requested;
  if (config.input_dim == 0 && train.front().embedding != nullptr) {
    config.input_dim = train.front().embedding->dim;
  }
  config.validate();
  for (const auto* set : {&train, &validation}) {
    for (const Example& ex : *set) {
      if (ex.embedding == nullptr || ex.embedding->dim != config.input_dim) {
        throw ValidationError("example '" + (ex.sentence ? ex.sentence->id : std::string("?")) +
                              "' has no embedding of dim " + std::to_string(config.input_dim));
      }
    }
  }

  TrainedTagger out;
  out.config = config;
  out.embedding_dim = config.input_dim;
  out.history.n_train = train.size();
  out.history.n_validation = validation.size();

  TaggerParams params = init_params(config, config.seed);
  AdamState adam = make_adam_state(params);
  TaggerParams best = params;
  EarlyStopping stopping(config.min_epochs, config.patience);
  const MetricMode monitor[] = {MetricMode::TokenMacro};

  std::size_t epoch = 1;
  for (; epoch <= config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t tokens = 0;
    const auto plan = make_batch_plan(train.size(), config.batch_size, config.seed, epoch);
    for (std::size_t b = 0; b < plan.size(); ++b) {
      const Batch batch = assemble_batch(train, plan[b]);
      BatchGradient bg = batch_gradient(params, batch.view(), options.execution);
      if (!std::isfinite(bg.loss_sum)) {
        throw RuntimeFailure("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b));
      }
      scale(bg.grad, 1.0 / static_cast<double>(bg.tokens));
      adam_step(params, bg.grad, adam, config.learning_rate);
      loss_sum += bg.loss_sum;
      tokens += bg.tokens;
    }
    out.history.train_loss.push_back(loss_sum / static_cast<double>(tokens));

    bool stop = false;
    if (!validation.empty()) {
      TrainedTagger probe{config, params, {}, config.input_dim};
      const auto predictions = predict_all(probe, validation, options.execution);
      std::vector<Sentence> gold;
      gold.reserve(validation.size());
      for (const Example& ex : validation) gold.push_back(*ex.sentence);
      const double metric = evaluate_predictions(gold, predictions, monitor).front().aggregate.f1;
      out.history.validation_metric.push_back(metric);
      stop = stopping.observe(epoch, metric);
      if (stopping.improved_last()) best = params;
    }
    if (options.progress != nullptr) {
      *options.progress << "epoch " << epoch << " loss " << out.history.train_loss.back();
      if (!validation.empty()) *options.progress << " val_f1 " << out.history.validation_metric.back();
      *options.progress << '\n';
    }
    if (stop) {
      out.history.stop_reason = StopReason::Early;
      break;
    }
  }
  out.history.stop_epoch = std::min(epoch, config.max_epochs);
  if (validation.empty()) {
    out.history.best_epoch = out.history.stop_epoch;
    out.params = std::move(params);
  } else {
    out.history.best_epoch = stopping.best_epoch();
    out.params = std::move(best);
  }
  return out;
}

TrainedTagger train_with_holdout(const TaggerConfig& config, std::span<const Example> examples,
                                 double validation_fraction, const TrainOptions& options) {
  if (!(validation_fraction >= 0.0 && validation_fraction < 0.5)) {
    throw ValidationError("validation_fraction must lie in [0, 0.5)");
  }
  if (validation_fraction == 0.0) return train_on_examples(config, examples, {}, options);

  auto [fit_idx, val_idx] = split_indices(examples.size(), 1.0 - validation_fraction,
                                          mix_seed(config.seed, kValidationSalt));
  if (fit_idx.empty() || val_idx.empty()) {
    throw ValidationError("training set of " + std::to_string(examples.size()) +
                          " sentences is too small for a validation hold-out of " +
                          std::to_string(validation_fraction));
  }
  std::vector<Example> fit, val;
  for (std::size_t i : fit_idx) fit.push_back(examples[i]);
  for (std::size_t i : val_idx) val.push_back(examples[i]);
  return train_on_examples(config, fit, val, options);
}

TrainedTagger train_tagger(const TaggerConfig& config, const Corpus& train_corpus,
                           const EmbeddingStore& store, double validation_fraction,
                           const TrainOptions& options) {
  const auto examples = make_examples(train_corpus, store);
  return train_with_holdout(config, examples, validation_fraction, options);
}

std::vector<Label> predict(const TrainedTagger& tagger, const Sentence& sentence,
                           const EmbeddingStore& store) {
  const EmbeddingMatrix& e = lookup(store, sentence);
  const EmbeddingMatrix* items[] = {&e};
  return decode_all_serial(tagger.params, items).front();
}

std::vector<std::vector<Label>> predict_all(const TrainedTagger& tagger,
                                            std::span<const Example> examples, Execution execution) {
  std::vector<const EmbeddingMatrix*> items;
  items.reserve(examples.size());
  for (const Example& ex : examples) items.push_back(ex.embedding);
  return decode_all(tagger.params, items, execution);
}

}  // namespace causalx
