#include "causalx/experiments.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>

#include "causalx/error.hpp"
#include "causalx/rng.hpp"
#include "causalx/train.hpp"
#include "parallel.hpp"

namespace causalx {

namespace {

constexpr std::uint64_t kSplitSalt = 0x73706c6974;     // "split"
constexpr std::uint64_t kWeightSalt = 0x776569676874;  // "weight"
constexpr std::uint64_t kSubsetSalt = 0x737562736574;  // "subset"

std::string sentence_key(const std::string& corpus, const Sentence& s) {
  return corpus + '\x1f' + s.id;
}

std::string content_key(const Sentence& s) {
  std::string key;
  for (const Token& t : s.tokens) {
    key += t.surface;
    key += '\x1f';
  }
  return key;
}

// One labelled pool of examples together with the identity and content keys
// the leakage audit compares against.
struct ExampleSet {
  std::string description;
  std::vector<Example> examples;
  std::vector<Sentence> sentences;
  std::set<std::string> keys;
  std::set<std::string> contents;

  void add(const Dataset& d, const std::vector<Example>& all, std::size_t i) {
    examples.push_back(all[i]);
    sentences.push_back(d.corpus[i]);
    keys.insert(sentence_key(d.name(), d.corpus[i]));
    contents.insert(content_key(d.corpus[i]));
  }
};

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const auto& k : b) n += a.count(k);
  return n;
}

struct Job {
  std::uint64_t seed = 0;
  std::string source;
  TaggerConfig config;
  std::shared_ptr<const ExampleSet> train;
  std::vector<std::pair<std::string, std::shared_ptr<const ExampleSet>>> targets;
  std::vector<double> scores;
  std::vector<std::string> audit;
};

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw RuntimeFailure(context + ": " + e.what());
  }
}

std::string target_list(const Job& job) {
  std::string names;
  for (const auto& [name, set] : job.targets) names += (names.empty() ? "" : ",") + name;
  return names;
}

void run_job(Job& job, const ExperimentOptions& options, Execution execution) {
  TrainedTagger tagger;
  try {
    TrainOptions train_options;
    train_options.execution = execution;
    tagger = train_with_holdout(job.config, job.train->examples, options.validation_fraction,
                                train_options);
  } catch (...) {
    rethrow_with_context("training failed (source=" + job.source + ", target=" +
                         target_list(job) + ", seed=" + std::to_string(job.seed) + ")");
  }
  const MetricMode modes[] = {options.metric};
  for (const auto& [name, test] : job.targets) {
    try {
      const auto predictions = predict_all(tagger, test->examples, execution);
      job.scores.push_back(evaluate_predictions(test->sentences, predictions, modes)
                               .front()
                               .aggregate.f1);
    } catch (...) {
      rethrow_with_context("evaluation failed (source=" + job.source + ", target=" + name +
                           ", seed=" + std::to_string(job.seed) + ")");
    }
    std::ostringstream line;
    line << "seed=" << job.seed << " train=" << job.source << " test=" << name
         << " train_set=" << job.train->description << " n_train=" << job.train->examples.size()
         << " n_test=" << test->examples.size()
         << " overlap=" << overlap(job.train->keys, test->keys)
         << " content_overlap=" << overlap(job.train->contents, test->contents);
    job.audit.push_back(line.str());
  }
}

void run_jobs(std::vector<Job>& jobs, const ExperimentOptions& options) {
  if (options.jobs <= 1) {
    for (Job& job : jobs) run_job(job, options, Execution::Parallel);
    return;
  }
  detail::parallel_for(
      jobs.size(), [&](std::size_t i) { run_job(jobs[i], options, Execution::Serial); },
      static_cast<int>(options.jobs));
}

void check_options(const ExperimentOptions& options) {
  if (options.seeds.empty()) throw ValidationError("experiment needs at least one seed");
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in (0, 1)");
  }
  if (!(options.validation_fraction >= 0.0 && options.validation_fraction < 0.5)) {
    throw ValidationError("validation_fraction must lie in [0, 0.5)");
  }
}

// Shared state of one experiment: every dataset's examples resolved once,
// one input dimension across all of them.
class Workspace {
 public:
  Workspace(std::vector<const Dataset*> datasets, const TaggerConfig& config,
            const ExperimentOptions& options)
      : datasets_(std::move(datasets)), config_(config), options_(options) {
    check_options(options);
    std::set<std::string> names;
    for (const Dataset* d : datasets_) {
      if (!names.insert(d->name()).second) {
        throw ValidationError("corpus name '" + d->name() + "' is used twice");
      }
      if (d->store.dim() != datasets_.front()->store.dim()) {
        throw ValidationError("embedding dims differ: '" + datasets_.front()->name() + "' has " +
                              std::to_string(datasets_.front()->store.dim()) + ", '" + d->name() +
                              "' has " + std::to_string(d->store.dim()));
      }
      if (config.input_dim != 0 && config.input_dim != d->store.dim()) {
        throw ValidationError("config input_dim " + std::to_string(config.input_dim) +
                              " does not match embedding dim " + std::to_string(d->store.dim()));
      }
      examples_.push_back(make_examples(d->corpus, d->store));
    }
    config_.input_dim = datasets_.front()->store.dim();
  }

  const Dataset& dataset(std::size_t d) const { return *datasets_[d]; }

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split(std::size_t d,
                                                                      std::uint64_t seed) const {
    const Dataset& data = dataset(d);
    if (data.corpus.size() < 2) {
      throw ValidationError("corpus '" + data.name() + "' needs at least 2 sentences to split");
    }
    auto halves = split_indices(data.corpus.size(), options_.train_fraction,
                                hash_string(data.name(), mix_seed(seed, kSplitSalt)));
    if (halves.first.empty() || halves.second.empty()) {
      throw ValidationError("corpus '" + data.name() + "' is too small for a " +
                            std::to_string(options_.train_fraction) + " split");
    }
    return halves;
  }

  void add(ExampleSet& set, std::size_t d, const std::vector<std::size_t>& indices) const {
    for (std::size_t i : indices) set.add(dataset(d), examples_[d], i);
  }

  std::shared_ptr<const ExampleSet> make_set(std::size_t d, const std::vector<std::size_t>& indices,
                                             std::string description) const {
    auto set = std::make_shared<ExampleSet>();
    set->description = std::move(description);
    add(*set, d, indices);
    return set;
  }

  std::vector<std::size_t> all(std::size_t d) const {
    std::vector<std::size_t> idx(dataset(d).corpus.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }

  // Weights depend on the seed and the source corpus only, so a given source
  // starts from the same initialisation in every experiment.
  TaggerConfig config_for(std::uint64_t seed, const std::string& source) const {
    TaggerConfig c = config_;
    c.seed = hash_string(source, mix_seed(seed, kWeightSalt));
    return c;
  }

  const ExperimentOptions& options() const { return options_; }

 private:
  std::vector<const Dataset*> datasets_;
  std::vector<std::vector<Example>> examples_;
  TaggerConfig config_;
  ExperimentOptions options_;
};

std::vector<const Dataset*> pointers(std::span<const Dataset> datasets) {
  std::vector<const Dataset*> out;
  for (const Dataset& d : datasets) out.push_back(&d);
  return out;
}

// Scores for the targets of a sweep: the source's test split when the source
// is itself a target, each target's test split otherwise. The training pool
// then excludes the source's test split.
struct SweepSetup {
  std::vector<std::string> targets;
  bool source_is_target = false;
};

SweepSetup sweep_setup(const Dataset& source, std::span<const Dataset> targets) {
  if (targets.empty()) throw ValidationError("sweep needs at least one target corpus");
  SweepSetup s;
  for (const Dataset& t : targets) {
    s.targets.push_back(t.name());
    if (t.name() == source.name()) s.source_is_target = true;
  }
  return s;
}

std::vector<const Dataset*> sweep_datasets(const Dataset& source,
                                           std::span<const Dataset> targets) {
  std::vector<const Dataset*> out = {&source};
  for (const Dataset& t : targets) {
    if (t.name() != source.name()) out.push_back(&t);
  }
  return out;
}

std::size_t dataset_index(const Workspace& ws, std::size_t n, const std::string& name) {
  for (std::size_t d = 0; d < n; ++d) {
    if (ws.dataset(d).name() == name) return d;
  }
  throw ValidationError("unknown corpus '" + name + "'");
}

// Runs one nested sweep over `pools[seed]` (indices into the source) at the
// given subset sizes.
SweepResult run_sweep(const Workspace& ws, std::size_t n_datasets, const SweepSetup& setup,
                      std::string label, const std::vector<double>& axis,
                      const std::vector<std::size_t>& counts,
                      const std::vector<std::vector<std::size_t>>& pools) {
  const ExperimentOptions& options = ws.options();
  const std::string& source = ws.dataset(0).name();
  std::vector<std::vector<std::shared_ptr<const ExampleSet>>> tests(options.seeds.size());
  for (std::size_t s = 0; s < options.seeds.size(); ++s) {
    for (const std::string& name : setup.targets) {
      const std::size_t d = dataset_index(ws, n_datasets, name);
      tests[s].push_back(ws.make_set(d, ws.split(d, options.seeds[s]).second, "test"));
    }
  }
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < axis.size(); ++a) {
    for (std::size_t s = 0; s < options.seeds.size(); ++s) {
      const std::uint64_t seed = options.seeds[s];
      const auto subset = nested_subset(pools[s], counts[a], mix_seed(seed, kSubsetSalt));
      std::ostringstream desc;
      desc << label << '@' << counts[a];
      Job job;
      job.seed = seed;
      job.source = source;
      job.config = ws.config_for(seed, source);
      job.train = ws.make_set(0, subset, desc.str());
      for (std::size_t t = 0; t < setup.targets.size(); ++t) {
        job.targets.emplace_back(setup.targets[t], tests[s][t]);
      }
      jobs.push_back(std::move(job));
    }
  }
  run_jobs(jobs, options);

  SweepResult r;
  r.source = source;
  r.label = std::move(label);
  r.axis = axis;
  r.targets = setup.targets;
  r.seeds = options.seeds;
  r.cells.assign(axis.size(), std::vector<CellScores>(setup.targets.size()));
  for (std::size_t a = 0; a < axis.size(); ++a) {
    for (std::size_t t = 0; t < setup.targets.size(); ++t) {
      std::vector<double> per_seed;
      for (std::size_t s = 0; s < options.seeds.size(); ++s) {
        per_seed.push_back(jobs[a * options.seeds.size() + s].scores[t]);
      }
      r.cells[a][t] = make_cell(std::move(per_seed));
    }
    for (std::size_t s = 0; s < options.seeds.size(); ++s) {
      for (const auto& line : jobs[a * options.seeds.size() + s].audit) r.audit.push_back(line);
    }
  }
  return r;
}

}  // namespace

CellScores make_cell(std::vector<double> per_seed) {
  CellScores c;
  c.mean = mean(per_seed);
  c.stddev = sample_stddev(per_seed);
  c.per_seed = std::move(per_seed);
  return c;
}

std::vector<std::size_t> nested_subset(const std::vector<std::size_t>& pool, std::size_t count,
                                       std::uint64_t seed) {
  if (count > pool.size()) {
    throw ValidationError("subset of " + std::to_string(count) + " requested from a pool of " +
                          std::to_string(pool.size()));
  }
  const auto order = shuffled_indices(pool.size(), seed);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[order[i]]);
  std::sort(out.begin(), out.end());
  return out;
}

TransferMatrix run_pairwise(std::span<const Dataset> datasets, const TaggerConfig& config,
                            const ExperimentOptions& options) {
  if (datasets.size() < 2) throw ValidationError("pairwise transfer needs at least 2 corpora");
  const Workspace ws(pointers(datasets), config, options);
  const std::size_t n = datasets.size();
  const std::size_t n_seeds = options.seeds.size();

  // Per seed and source: one job on the train split (diagonal), one on the
  // whole corpus (every other column).
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = options.seeds[s];
    std::vector<std::shared_ptr<const ExampleSet>> train_splits, tests;
    for (std::size_t d = 0; d < n; ++d) {
      const auto [train, test] = ws.split(d, seed);
      train_splits.push_back(ws.make_set(d, train, "split"));
      tests.push_back(ws.make_set(d, test, "test"));
    }
    for (std::size_t i = 0; i < n; ++i) {
      Job diag;
      diag.seed = seed;
      diag.source = datasets[i].name();
      diag.config = ws.config_for(seed, diag.source);
      diag.train = train_splits[i];
      diag.targets.emplace_back(datasets[i].name(), tests[i]);
      jobs.push_back(std::move(diag));

      Job full;
      full.seed = seed;
      full.source = datasets[i].name();
      full.config = ws.config_for(seed, full.source);
      full.train = ws.make_set(i, ws.all(i), "full");
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) full.targets.emplace_back(datasets[j].name(), tests[j]);
      }
      jobs.push_back(std::move(full));
    }
  }
  run_jobs(jobs, options);

  TransferMatrix m;
  m.seeds = options.seeds;
  for (const Dataset& d : datasets) m.names.push_back(d.name());
  std::vector<std::vector<std::vector<double>>> scores(
      n, std::vector<std::vector<double>>(n, std::vector<double>(n_seeds)));
  for (std::size_t s = 0; s < n_seeds; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const Job& diag = jobs[(s * n + i) * 2];
      const Job& full = jobs[(s * n + i) * 2 + 1];
      scores[i][i][s] = diag.scores[0];
      std::size_t k = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          m.audit.push_back(diag.audit[0]);
        } else {
          scores[i][j][s] = full.scores[k];
          m.audit.push_back(full.audit[k]);
          ++k;
        }
      }
    }
  }
  m.cells.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m.cells[i].push_back(make_cell(scores[i][j]));
  }
  return m;
}

CombinedResult run_combined(const Dataset& target, std::span<const Dataset> others,
                            const TaggerConfig& config, const ExperimentOptions& options) {
  std::vector<const Dataset*> all = {&target};
  for (const Dataset& d : others) all.push_back(&d);
  const Workspace ws(all, config, options);
  const std::size_t n_seeds = options.seeds.size();

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = options.seeds[s];
    const auto [train, test] = ws.split(0, seed);
    const auto test_set = ws.make_set(0, test, "test");

    Job baseline;
    baseline.seed = seed;
    baseline.source = target.name();
    baseline.config = ws.config_for(seed, target.name());
    baseline.train = ws.make_set(0, train, "split");
    baseline.targets.emplace_back(target.name(), test_set);

    auto augmented_set = std::make_shared<ExampleSet>();
    augmented_set->description = "split+others";
    ws.add(*augmented_set, 0, train);
    for (std::size_t d = 1; d < all.size(); ++d) ws.add(*augmented_set, d, ws.all(d));

    Job augmented = baseline;
    augmented.source = target.name() + "+others";
    augmented.train = std::move(augmented_set);

    jobs.push_back(std::move(baseline));
    jobs.push_back(std::move(augmented));
  }
  run_jobs(jobs, options);

  CombinedResult r;
  r.target = target.name();
  for (const Dataset& d : others) r.others.push_back(d.name());
  r.seeds = options.seeds;
  std::vector<double> base, aug;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    base.push_back(jobs[2 * s].scores[0]);
    aug.push_back(jobs[2 * s + 1].scores[0]);
    r.audit.push_back(jobs[2 * s].audit[0]);
    r.audit.push_back(jobs[2 * s + 1].audit[0]);
  }
  r.baseline = make_cell(base);
  r.augmented = make_cell(aug);
  r.delta = r.augmented.mean - r.baseline.mean;
  r.pct_change = r.baseline.mean != 0.0 ? 100.0 * r.delta / r.baseline.mean : 0.0;
  if (n_seeds >= 2) {
    r.significance = welch_t_test(aug, base);
  } else {
    r.significance.mean_a = r.augmented.mean;
    r.significance.mean_b = r.baseline.mean;
  }
  return r;
}

SweepResult run_size_sweep(const Dataset& source, const std::vector<double>& fractions,
                           std::span<const Dataset> targets, const TaggerConfig& config,
                           const ExperimentOptions& options) {
  if (fractions.empty()) throw ValidationError("size sweep needs at least one fraction");
  for (std::size_t a = 0; a < fractions.size(); ++a) {
    if (!(fractions[a] > 0.0 && fractions[a] <= 1.0)) {
      throw ValidationError("sweep fraction " + std::to_string(fractions[a]) +
                            " is outside (0, 1]");
    }
    if (a > 0 && !(fractions[a] > fractions[a - 1])) {
      throw ValidationError("sweep fractions must be strictly increasing");
    }
  }
  const SweepSetup setup = sweep_setup(source, targets);
  const auto datasets = sweep_datasets(source, targets);
  const Workspace ws(datasets, config, options);

  std::vector<std::vector<std::size_t>> pools;
  for (std::uint64_t seed : options.seeds) {
    pools.push_back(setup.source_is_target ? ws.split(0, seed).first : ws.all(0));
  }
  std::vector<std::size_t> counts;
  for (double f : fractions) {
    const auto pool_size = pools.front().size();
    const auto count =
        static_cast<std::size_t>(f * static_cast<double>(pool_size) + 1e-9);
    if (count == 0) {
      throw ValidationError("sweep fraction " + std::to_string(f) + " of " +
                            std::to_string(pool_size) + " sentences selects none");
    }
    counts.push_back(count);
  }
  return run_sweep(ws, datasets.size(), setup, "fraction", fractions, counts, pools);
}

CompositionResult run_composition_sweep(const Dataset& source, std::span<const Dataset> targets,
                                        const std::vector<std::size_t>& sizes,
                                        const MarkerLexicon& lexicon, const TaggerConfig& config,
                                        const ExperimentOptions& options) {
  if (sizes.empty()) throw ValidationError("composition sweep needs at least one size");
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    if (sizes[a] == 0) throw ValidationError("composition sizes must be positive");
    if (a > 0 && sizes[a] <= sizes[a - 1]) {
      throw ValidationError("composition sizes must be strictly increasing");
    }
  }
  const SweepSetup setup = sweep_setup(source, targets);
  const auto datasets = sweep_datasets(source, targets);
  const Workspace ws(datasets, config, options);

  std::vector<bool> explicit_flags;
  for (const Sentence& s : source.corpus) explicit_flags.push_back(is_explicit(s, lexicon));

  std::vector<std::vector<std::size_t>> implicit_pools, explicit_pools;
  for (std::uint64_t seed : options.seeds) {
    const auto pool = setup.source_is_target ? ws.split(0, seed).first : ws.all(0);
    std::vector<std::size_t> imp, exp;
    for (std::size_t i : pool) (explicit_flags[i] ? exp : imp).push_back(i);
    const std::size_t largest = sizes.back();
    if (largest > imp.size() || largest > exp.size()) {
      throw ValidationError("composition size " + std::to_string(largest) + " exceeds a partition of '" +
                            source.name() + "' (implicit " + std::to_string(imp.size()) +
                            ", explicit " + std::to_string(exp.size()) + ")");
    }
    implicit_pools.push_back(std::move(imp));
    explicit_pools.push_back(std::move(exp));
  }
  const std::vector<double> axis(sizes.begin(), sizes.end());
  CompositionResult r;
  r.implicit_only = run_sweep(ws, datasets.size(), setup, "implicit", axis, sizes, implicit_pools);
  r.explicit_only = run_sweep(ws, datasets.size(), setup, "explicit", axis, sizes, explicit_pools);
  return r;
}

}  // namespace causalx
