#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalx/corpus.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/markers.hpp"
#include "causalx/metrics.hpp"
#include "causalx/stats.hpp"
#include "causalx/tagger_model.hpp"

namespace causalx {

struct Dataset {
  Corpus corpus;
  EmbeddingStore store;

  const std::string& name() const { return corpus.name(); }
};

struct ExperimentOptions {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  double train_fraction = 0.7;
  double validation_fraction = 0.0;  // 0 = fixed max_epochs regime
  MetricMode metric = MetricMode::Phrase;
  std::size_t jobs = 1;  // independent training runs in flight
};

// Per-seed scores of one cell, in seed order.
struct CellScores {
  std::vector<double> per_seed;
  double mean = 0.0;
  double stddev = 0.0;
};
CellScores make_cell(std::vector<double> per_seed);

struct TransferMatrix {
  std::vector<std::string> names;           // row = train, column = test
  std::vector<std::vector<CellScores>> cells;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> audit;           // one line per (seed, train, test)
};

// Diagonal cells train on the source's train split; off-diagonal cells train
// on the whole source. Every cell is scored on the target's test split.
TransferMatrix run_pairwise(std::span<const Dataset> datasets, const TaggerConfig& config,
                            const ExperimentOptions& options);

struct CombinedResult {
  std::string target;
  std::vector<std::string> others;
  CellScores baseline;   // target train split only
  CellScores augmented;  // target train split + every other corpus in full
  double delta = 0.0;
  double pct_change = 0.0;
  SignificanceResult significance;  // only meaningful with >= 2 seeds
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> audit;
};

CombinedResult run_combined(const Dataset& target, std::span<const Dataset> others,
                            const TaggerConfig& config, const ExperimentOptions& options);

struct SweepResult {
  std::string source;
  std::string label;               // e.g. "fraction", "implicit", "explicit"
  std::vector<double> axis;        // strictly increasing
  std::vector<std::string> targets;
  std::vector<std::vector<CellScores>> cells;  // [axis][target]
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> audit;
};

// Nested per-seed subsets: each fraction's sample contains every smaller one.
// Subsets keep corpus order, so fraction 1.0 trains on the corpus exactly as
// the pairwise off-diagonal cells do.
SweepResult run_size_sweep(const Dataset& source, const std::vector<double>& fractions,
                           std::span<const Dataset> targets, const TaggerConfig& config,
                           const ExperimentOptions& options);

struct CompositionResult {
  SweepResult implicit_only;
  SweepResult explicit_only;
};

CompositionResult run_composition_sweep(const Dataset& source, std::span<const Dataset> targets,
                                        const std::vector<std::size_t>& sizes,
                                        const MarkerLexicon& lexicon, const TaggerConfig& config,
                                        const ExperimentOptions& options);

// Nested subset helper shared by both sweeps: the first `count` entries of a
// seeded permutation of `pool`, returned in ascending order.
std::vector<std::size_t> nested_subset(const std::vector<std::size_t>& pool, std::size_t count,
                                       std::uint64_t seed);

}  // namespace causalx
