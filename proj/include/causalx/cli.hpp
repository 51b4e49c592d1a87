#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalx/experiments.hpp"
#include "causalx/metrics.hpp"
#include "causalx/tagger_model.hpp"

namespace causalx {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Configuration of `train`: tagger hyperparameters plus the files they act on.
// Relative paths resolve against the config file's directory.
struct RunConfig {
  TaggerConfig tagger;
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
  std::filesystem::path output_dir;
  std::filesystem::path lexicon;  // empty = built-in
  std::vector<std::uint64_t> seeds;
  std::vector<MetricMode> modes = {MetricMode::Phrase, MetricMode::TokenMacro};
  double train_fraction = 0.0;  // > 0: train on that split of the corpus only
  double validation_fraction = 0.0;
  nlohmann::json raw;  // echoed verbatim into the outputs
};

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

enum class ExperimentKind { Pairwise, Combined, SizeSweep, CompositionSweep };

struct ExperimentEntry {
  ExperimentKind kind = ExperimentKind::Pairwise;
  std::string name;  // results subdirectory
  std::string target;
  std::string source;
  std::vector<std::string> targets;
  std::vector<double> fractions;
  std::vector<std::size_t> sizes;
};

struct CorpusEntry {
  std::string name;
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
};

struct ExperimentSpec {
  std::vector<CorpusEntry> corpora;
  std::filesystem::path lexicon;
  std::filesystem::path output_dir;
  TaggerConfig tagger;
  ExperimentOptions options;
  std::vector<ExperimentEntry> experiments;
  nlohmann::json raw;
};

// Validates kinds, names and cross-references before anything is trained.
ExperimentSpec parse_experiment_spec(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Entry point shared by the executable and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalx
