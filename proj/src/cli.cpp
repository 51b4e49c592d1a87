#include "causalx/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "causalx/checkpoint.hpp"
#include "causalx/corpus.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/error.hpp"
#include "causalx/markers.hpp"
#include "causalx/report.hpp"
#include "causalx/train.hpp"

namespace causalx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kTaggerKeys = {"input_dim",  "hidden_size", "rnn_kind",
                                           "decoder_kind", "learning_rate", "batch_size",
                                           "max_epochs", "min_epochs",  "patience",
                                           "seed"};

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeFailure("error writing " + path.string());
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + dir.string() + ": " + ec.message());
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path existing(const fs::path& base, const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ValidationError("missing string field \"" + key + "\"");
  }
  const fs::path p = resolve(base, j[key].get<std::string>());
  if (!fs::exists(p)) throw ValidationError(key + " path does not exist: " + p.string());
  return p;
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("field \"" + key + "\": " + e.what());
  }
}

std::vector<MetricMode> parse_modes(const json& j) {
  std::vector<MetricMode> modes;
  if (j.is_string()) {
    modes.push_back(parse_metric_mode(j.get<std::string>()));
  } else if (j.is_array()) {
    for (const auto& m : j) {
      if (!m.is_string()) throw ValidationError("metric modes must be strings");
      modes.push_back(parse_metric_mode(m.get<std::string>()));
    }
  } else {
    throw ValidationError("\"modes\" must be a string or an array of strings");
  }
  if (modes.empty()) throw ValidationError("at least one metric mode is required");
  return modes;
}

std::vector<MetricMode> parse_mode_list(const std::string& text) {
  std::vector<MetricMode> modes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) modes.push_back(parse_metric_mode(item));
  }
  if (modes.empty()) throw ValidationError("at least one metric mode is required");
  return modes;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

MarkerLexicon lexicon_from(const fs::path& path) {
  return path.empty() ? MarkerLexicon::defaults() : MarkerLexicon::load(path);
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void print_reports(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "mode          precision  recall     f1\n";
  for (const EvalReport& r : reports) {
    std::string mode(to_string(r.mode));
    mode.resize(14, ' ');
    out << mode << fixed(r.aggregate.precision, 6) << "   " << fixed(r.aggregate.recall, 6)
        << "   " << fixed(r.aggregate.f1, 6) << '\n';
  }
}

// CoNLL-style input: one token per line with columns
//   index  token  head  rel  label
// (1-based index; head 0 is the root), blank lines between sentences, and
// "# id = ..." / "# explicit = true|false" comments.
Corpus parse_conll(std::string_view text, const std::string& dataset) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::size_t line_no = 0, sentence_line = 0;
  auto flush = [&] {
    if (current.tokens.empty()) {
      current = Sentence{};
      return;
    }
    if (current.id.empty()) current.id = dataset + "-" + std::to_string(sentences.size() + 1);
    current.dataset = dataset;
    try {
      validate_sentence(current);
    } catch (const ValidationError& e) {
      throw ValidationError("sentence starting at line " + std::to_string(sentence_line) + ": " +
                            e.what());
    }
    sentences.push_back(std::move(current));
    current = Sentence{};
  };
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    if (current.tokens.empty() && current.id.empty()) sentence_line = line_no;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      std::string value = line.substr(eq + 1);
      auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
      };
      trim(key);
      trim(value);
      if (key == "id") current.id = value;
      if (key == "explicit") {
        if (value != "true" && value != "false") {
          throw ValidationError("line " + std::to_string(line_no) +
                                ": explicit must be true or false");
        }
        current.explicit_flag = value == "true";
      }
      continue;
    }
    std::istringstream cols(line);
    std::string index, surface, head, rel, label;
    if (!(cols >> index >> surface >> head >> rel >> label)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected 5 columns (index token head rel label)");
    }
    try {
      const int idx = std::stoi(index);
      if (idx != static_cast<int>(current.tokens.size()) + 1) {
        throw ValidationError("token index " + index + " out of sequence");
      }
      const int h = std::stoi(head);
      current.tokens.push_back({surface, h - 1, rel});
      current.labels.push_back(parse_label(label));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(line_no) + ": index and head must be integers");
    }
  }
  flush();
  return Corpus(dataset, std::move(sentences));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_validate(const std::string& corpus_path, const std::string& lexicon_path,
                 const std::string& embeddings_path, std::ostream& out) {
  const Corpus corpus = load_corpus(corpus_path);
  const CorpusStats stats = corpus_stats(corpus, lexicon_from(lexicon_path));
  out << "corpus           " << corpus.name() << '\n'
      << "sentences        " << stats.n_sentences << '\n'
      << "implicit         " << percent(stats.pct_implicit) << '\n'
      << "mean_cause_len   " << fixed(stats.mean_cause_len, 2) << '\n'
      << "mean_effect_len  " << fixed(stats.mean_effect_len, 2) << '\n';
  if (!embeddings_path.empty()) {
    const EmbeddingStore store = load_embedding_file(embeddings_path);
    make_examples(corpus, store);
    out << "embeddings       ok (dim " << store.dim() << ")\n";
  }
  return kExitOk;
}

int cmd_train(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  const RunConfig rc = parse_run_config(read_json_file(config_path), config_path.parent_path());
  Corpus corpus = load_corpus(rc.corpus);
  const EmbeddingStore store = load_embedding_file(rc.embeddings);
  TaggerConfig base = rc.tagger;
  if (base.input_dim == 0) base.input_dim = store.dim();
  if (base.input_dim != store.dim()) {
    throw ValidationError("input_dim " + std::to_string(base.input_dim) +
                          " does not match embedding dim " + std::to_string(store.dim()));
  }
  std::vector<std::uint64_t> seeds = rc.seeds;
  if (seeds.empty()) seeds.push_back(base.seed);

  make_dirs(rc.output_dir);
  write_text(rc.output_dir / "config.json", rc.raw.dump(2) + "\n");
  for (std::uint64_t seed : seeds) {
    TaggerConfig config = base;
    config.seed = seed;
    const fs::path dir = seeds.size() == 1 ? rc.output_dir
                                           : rc.output_dir / ("seed-" + std::to_string(seed));
    make_dirs(dir);
    Corpus train = corpus;
    std::optional<Corpus> test;
    if (rc.train_fraction > 0.0) {
      auto [a, b] = split_train_test(corpus, rc.train_fraction, seed);
      train = std::move(a);
      test = std::move(b);
    }
    TrainOptions options;
    options.progress = &err;
    err << "training seed " << seed << " on " << train.size() << " sentences\n";
    const TrainedTagger tagger =
        train_tagger(config, train, store, rc.validation_fraction, options);
    save_checkpoint(tagger, dir / "checkpoint.cxck");
    write_text(dir / "history.json", history_to_json(tagger.history));
    out << "wrote " << (dir / "checkpoint.cxck").string() << " (" << tagger.history.stop_epoch
        << " epochs, " << to_string(tagger.history.stop_reason) << ")\n";
    if (test) {
      const auto reports = corpus_eval(tagger, *test, store, rc.modes);
      json j = json::array();
      for (const auto& r : reports) j.push_back(report_to_json(r));
      write_text(dir / "eval.json", j.dump(2) + "\n");
      print_reports(out, reports);
    }
  }
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& corpus_path,
             const std::string& embeddings_path, const std::string& modes_text,
             const std::string& output, std::ostream& out) {
  for (const auto& p : {checkpoint, corpus_path, embeddings_path}) {
    if (!fs::exists(p)) throw ValidationError("no such file: " + p);
  }
  const TrainedTagger tagger = load_checkpoint(checkpoint);
  const Corpus corpus = load_corpus(corpus_path);
  const EmbeddingStore store = load_embedding_file(embeddings_path);
  const auto modes = parse_mode_list(modes_text);
  const auto reports = corpus_eval(tagger, corpus, store, modes);
  print_reports(out, reports);
  if (!output.empty()) {
    json j = json::array();
    for (const auto& r : reports) j.push_back(report_to_json(r));
    write_text(output, j.dump(2) + "\n");
  }
  return kExitOk;
}

const Dataset& find_dataset(const std::vector<Dataset>& datasets, const std::string& name) {
  for (const Dataset& d : datasets) {
    if (d.name() == name) return d;
  }
  throw ValidationError("unknown corpus '" + name + "'");
}

std::vector<Dataset> pick(const std::vector<Dataset>& datasets,
                          const std::vector<std::string>& names) {
  std::vector<Dataset> out;
  for (const auto& n : names) out.push_back(find_dataset(datasets, n));
  return out;
}

int cmd_experiment(const fs::path& spec_path, int jobs, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec = parse_experiment_spec(read_json_file(spec_path), spec_path.parent_path());
  if (jobs > 0) spec.options.jobs = static_cast<std::size_t>(jobs);
  const MarkerLexicon lexicon = lexicon_from(spec.lexicon);

  std::vector<Dataset> datasets;
  for (const CorpusEntry& c : spec.corpora) {
    datasets.push_back({load_corpus(c.corpus, c.name), load_embedding_file(c.embeddings)});
  }
  make_dirs(spec.output_dir);
  write_text(spec.output_dir / "spec.json", spec.raw.dump(2) + "\n");

  json manifest = {{"completed", json::array()}, {"failed", nullptr}};
  auto write_manifest = [&] {
    write_text(spec.output_dir / "manifest.json", manifest.dump(2) + "\n");
  };
  for (const ExperimentEntry& e : spec.experiments) {
    const fs::path dir = spec.output_dir / e.name;
    err << "running " << e.name << '\n';
    try {
      switch (e.kind) {
        case ExperimentKind::Pairwise: {
          const auto chosen = e.targets.empty() ? datasets : pick(datasets, e.targets);
          render_report(run_pairwise(chosen, spec.tagger, spec.options), dir);
          break;
        }
        case ExperimentKind::Combined: {
          std::vector<std::string> others = e.targets;
          if (others.empty()) {
            for (const Dataset& d : datasets) {
              if (d.name() != e.target) others.push_back(d.name());
            }
          }
          render_report(run_combined(find_dataset(datasets, e.target), pick(datasets, others),
                                     spec.tagger, spec.options),
                        dir);
          break;
        }
        case ExperimentKind::SizeSweep:
          render_report(run_size_sweep(find_dataset(datasets, e.source), e.fractions,
                                       pick(datasets, e.targets), spec.tagger, spec.options),
                        dir);
          break;
        case ExperimentKind::CompositionSweep:
          render_report(run_composition_sweep(find_dataset(datasets, e.source),
                                              pick(datasets, e.targets), e.sizes, lexicon,
                                              spec.tagger, spec.options),
                        dir);
          break;
      }
    } catch (const std::exception& ex) {
      manifest["failed"] = {{"name", e.name}, {"error", ex.what()}};
      write_manifest();
      throw;
    }
    manifest["completed"].push_back(e.name);
    write_manifest();
    out << "wrote " << dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_report(const fs::path& dir, std::ostream& out) {
  if (fs::exists(dir / "raw_scores.json")) {
    rerender_report(dir);
    out << "rendered " << dir.string() << '\n';
    return kExitOk;
  }
  if (!fs::is_directory(dir)) throw ValidationError("no such results directory: " + dir.string());
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "raw_scores.json")) {
      subdirs.push_back(entry.path());
    }
  }
  if (subdirs.empty()) throw ValidationError("no raw_scores.json under " + dir.string());
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    rerender_report(d);
    out << "rendered " << d.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("run config must be a JSON object");
  static const std::set<std::string> run_keys = {
      "corpus", "embeddings", "output_dir",          "lexicon", "seeds",
      "modes",  "train_fraction", "validation_fraction"};
  json tagger = json::object();
  for (const auto& [key, value] : j.items()) {
    if (kTaggerKeys.count(key)) {
      tagger[key] = value;
    } else if (!run_keys.count(key)) {
      throw ValidationError("unknown run config key \"" + key + "\"");
    }
  }
  RunConfig rc;
  rc.raw = j;
  rc.tagger = config_from_json(tagger);
  rc.corpus = existing(base_dir, j, "corpus");
  rc.embeddings = existing(base_dir, j, "embeddings");
  if (!j.contains("output_dir") || !j["output_dir"].is_string()) {
    throw ValidationError("missing string field \"output_dir\"");
  }
  rc.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  if (j.contains("lexicon")) rc.lexicon = existing(base_dir, j, "lexicon");
  rc.seeds = get_field<std::vector<std::uint64_t>>(j, "seeds", {});
  if (j.contains("modes")) rc.modes = parse_modes(j["modes"]);
  rc.train_fraction = get_field<double>(j, "train_fraction", 0.0);
  rc.validation_fraction = get_field<double>(j, "validation_fraction", 0.0);
  if (!(rc.train_fraction >= 0.0 && rc.train_fraction < 1.0)) {
    throw ValidationError("train_fraction must lie in [0, 1) (0 = train on the whole corpus)");
  }
  if (!(rc.validation_fraction >= 0.0 && rc.validation_fraction < 0.5)) {
    throw ValidationError("validation_fraction must lie in [0, 0.5)");
  }
  TaggerConfig check = rc.tagger;
  if (check.input_dim == 0) check.input_dim = 1;
  check.validate();
  return rc;
}

ExperimentSpec parse_experiment_spec(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ValidationError("experiment spec must be a JSON object");
  static const std::set<std::string> keys = {"corpora", "lexicon", "output_dir",
                                             "tagger", "seeds", "train_fraction",
                                             "validation_fraction", "metric", "jobs",
                                             "experiments"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ValidationError("unknown experiment spec key \"" + key + "\"");
  }
  ExperimentSpec spec;
  spec.raw = j;

  if (!j.contains("corpora") || !j["corpora"].is_array() || j["corpora"].empty()) {
    throw ValidationError("\"corpora\" must be a nonempty array");
  }
  std::set<std::string> names;
  for (const auto& c : j["corpora"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
      throw ValidationError("every corpus entry needs a string \"name\"");
    }
    CorpusEntry entry;
    entry.name = c["name"].get<std::string>();
    if (!names.insert(entry.name).second) {
      throw ValidationError("corpus name '" + entry.name + "' is listed twice");
    }
    entry.corpus = existing(base_dir, c, "corpus");
    entry.embeddings = existing(base_dir, c, "embeddings");
    spec.corpora.push_back(std::move(entry));
  }
  if (j.contains("lexicon")) spec.lexicon = existing(base_dir, j, "lexicon");
  if (!j.contains("output_dir") || !j["output_dir"].is_string()) {
    throw ValidationError("missing string field \"output_dir\"");
  }
  spec.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  if (j.contains("tagger")) spec.tagger = config_from_json(j["tagger"]);
  {
    TaggerConfig check = spec.tagger;
    if (check.input_dim == 0) check.input_dim = 1;
    check.validate();
  }
  spec.options.seeds = get_field(j, "seeds", spec.options.seeds);
  spec.options.train_fraction = get_field(j, "train_fraction", spec.options.train_fraction);
  spec.options.validation_fraction =
      get_field(j, "validation_fraction", spec.options.validation_fraction);
  if (j.contains("metric")) {
    if (!j["metric"].is_string()) throw ValidationError("\"metric\" must be a string");
    spec.options.metric = parse_metric_mode(j["metric"].get<std::string>());
  }
  spec.options.jobs = get_field<std::size_t>(j, "jobs", spec.options.jobs);
  if (spec.options.seeds.empty()) throw ValidationError("\"seeds\" must be nonempty");

  if (!j.contains("experiments") || !j["experiments"].is_array() || j["experiments"].empty()) {
    throw ValidationError("\"experiments\" must be a nonempty array");
  }
  static const std::map<std::string, ExperimentKind> kinds = {
      {"pairwise", ExperimentKind::Pairwise},
      {"combined", ExperimentKind::Combined},
      {"size_sweep", ExperimentKind::SizeSweep},
      {"composition_sweep", ExperimentKind::CompositionSweep}};
  auto known_corpus = [&](const std::string& n, const std::string& where) {
    if (!names.count(n)) throw ValidationError(where + ": unknown corpus '" + n + "'");
  };
  std::set<std::string> experiment_names;
  for (std::size_t i = 0; i < j["experiments"].size(); ++i) {
    const json& e = j["experiments"][i];
    const std::string where = "experiment " + std::to_string(i);
    if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) {
      throw ValidationError(where + " needs a string \"kind\"");
    }
    const std::string kind = e["kind"].get<std::string>();
    const auto it = kinds.find(kind);
    if (it == kinds.end()) {
      throw ValidationError(where + ": unknown experiment kind '" + kind +
                            "' (expected pairwise, combined, size_sweep or composition_sweep)");
    }
    ExperimentEntry entry;
    entry.kind = it->second;
    entry.name = get_field<std::string>(e, "name", kind);
    if (entry.name.empty() || entry.name.find('/') != std::string::npos || entry.name == "." ||
        entry.name == "..") {
      throw ValidationError(where + ": invalid name '" + entry.name + "'");
    }
    if (!experiment_names.insert(entry.name).second) {
      throw ValidationError(where + ": duplicate experiment name '" + entry.name + "'");
    }
    switch (entry.kind) {
      case ExperimentKind::Pairwise:
        entry.targets = get_field<std::vector<std::string>>(e, "corpora", {});
        if (entry.targets.empty() && spec.corpora.size() < 2) {
          throw ValidationError(where + ": pairwise transfer needs at least 2 corpora");
        }
        if (!entry.targets.empty() && entry.targets.size() < 2) {
          throw ValidationError(where + ": pairwise transfer needs at least 2 corpora");
        }
        break;
      case ExperimentKind::Combined:
        entry.target = get_field<std::string>(e, "target", "");
        known_corpus(entry.target, where);
        entry.targets = get_field<std::vector<std::string>>(e, "others", {});
        for (const auto& o : entry.targets) {
          if (o == entry.target) throw ValidationError(where + ": target listed among others");
        }
        break;
      case ExperimentKind::SizeSweep:
        entry.source = get_field<std::string>(e, "source", "");
        known_corpus(entry.source, where);
        entry.targets = get_field<std::vector<std::string>>(e, "targets", {});
        entry.fractions = get_field<std::vector<double>>(e, "fractions", {});
        if (entry.fractions.empty()) throw ValidationError(where + ": \"fractions\" is required");
        break;
      case ExperimentKind::CompositionSweep:
        entry.source = get_field<std::string>(e, "source", "");
        known_corpus(entry.source, where);
        entry.targets = get_field<std::vector<std::string>>(e, "targets", {});
        entry.sizes = get_field<std::vector<std::size_t>>(e, "sizes", {});
        if (entry.sizes.empty()) throw ValidationError(where + ": \"sizes\" is required");
        break;
    }
    if ((entry.kind == ExperimentKind::SizeSweep ||
         entry.kind == ExperimentKind::CompositionSweep) &&
        entry.targets.empty()) {
      throw ValidationError(where + ": \"targets\" is required");
    }
    for (const auto& t : entry.targets) known_corpus(t, where);
    spec.experiments.push_back(std::move(entry));
  }
  return spec;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal relation extraction: C/E/O taggers, phrase metrics, transfer experiments",
               "causalx"};
  app.require_subcommand(1);

  std::string corpus_path, lexicon_path, embeddings_path, output, modes = "PHRASE,TOKEN_MACRO";
  std::string checkpoint, config_path, spec_path, results_dir, format = "conll", dataset;
  std::string required, forbidden;
  std::size_t dim = 32, count = 0;
  std::uint64_t seed = 0;
  int jobs = 0;

  auto* validate = app.add_subcommand("validate", "Check a corpus file and print its statistics");
  validate->add_option("corpus", corpus_path, "Corpus file (NDJSON)")->required();
  validate->add_option("--lexicon", lexicon_path, "Marker lexicon (default: built-in)");
  validate->add_option("--embeddings", embeddings_path, "Also check alignment with a CEMB file");

  auto* ingest = app.add_subcommand("ingest", "Convert a CoNLL-style file to the corpus format");
  ingest->add_option("input", corpus_path, "Input file")->required();
  ingest->add_option("-o,--output", output, "Output corpus file")->required();
  ingest->add_option("--format", format, "Input format")->check(CLI::IsMember({"conll"}));
  ingest->add_option("--dataset", dataset, "Dataset name")->required();

  auto* subsample = app.add_subcommand("subsample", "Draw a marker-filtered sample of a corpus");
  subsample->add_option("corpus", corpus_path, "Corpus file")->required();
  subsample->add_option("-o,--output", output, "Output corpus file")->required();
  subsample->add_option("--require", required, "Comma-separated required markers")->required();
  subsample->add_option("--forbid", forbidden, "Comma-separated forbidden markers");
  subsample->add_option("-n,--count", count, "Sample size")->required();
  subsample->add_option("--seed", seed, "Sampling seed");
  subsample->add_option("--dataset", dataset, "Name of the sampled corpus");

  auto* hash = app.add_subcommand("hash-embed", "Write deterministic hash embeddings for a corpus");
  hash->add_option("corpus", corpus_path, "Corpus file")->required();
  hash->add_option("-o,--output", output, "Output CEMB file")->required();
  hash->add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber);
  hash->add_option("--seed", seed, "Hash seed");

  auto* train = app.add_subcommand("train", "Train a tagger from a JSON run config");
  train->add_option("config", config_path, "Run config (JSON)")->required();

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a corpus");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval->add_option("--corpus", corpus_path, "Corpus file")->required();
  eval->add_option("--embeddings", embeddings_path, "CEMB file")->required();
  eval->add_option("--modes", modes, "Comma-separated metric modes");
  eval->add_option("-o,--output", output, "Write the reports as JSON");

  auto* experiment = app.add_subcommand("experiment", "Run the experiments of a JSON spec");
  experiment->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  experiment->add_option("--jobs", jobs, "Training runs in parallel (overrides the spec)")
      ->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Re-render tables from raw_scores.json files");
  report->add_option("dir", results_dir, "Experiment or results directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitValidation;
  }

  try {
    if (*validate) return cmd_validate(corpus_path, lexicon_path, embeddings_path, out);
    if (*ingest) {
      const Corpus corpus = parse_conll(read_text(corpus_path), dataset);
      save_corpus(corpus, output);
      out << "wrote " << corpus.size() << " sentences to " << output << '\n';
      return kExitOk;
    }
    if (*subsample) {
      const Corpus corpus = load_corpus(corpus_path);
      const Corpus sample = subsample_by_marker(corpus, split_list(required),
                                                split_list(forbidden), count, seed, dataset);
      save_corpus(sample, output);
      out << "wrote " << sample.size() << " sentences to " << output << '\n';
      return kExitOk;
    }
    if (*hash) {
      const Corpus corpus = load_corpus(corpus_path);
      save_embedding_file(hash_embeddings(corpus, dim, seed), output);
      out << "wrote " << corpus.size() << " records (dim " << dim << ") to " << output << '\n';
      return kExitOk;
    }
    if (*train) return cmd_train(config_path, out, err);
    if (*eval) return cmd_eval(checkpoint, corpus_path, embeddings_path, modes, output, out);
    if (*experiment) return cmd_experiment(spec_path, jobs, out, err);
    if (*report) return cmd_report(results_dir, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace causalx
