#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "causalx/checkpoint.hpp"
#include "causalx/cli.hpp"
#include "causalx/error.hpp"
#include "synthetic.hpp"

using namespace causalx;
using namespace causalx::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("causalx_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Corpus file plus matching hash embeddings.
  void add_corpus(const std::string& stem, const Corpus& corpus, std::size_t dim = 8) {
    save_corpus(corpus, dir_ / (stem + ".ndjson"));
    save_embedding_file(hash_embeddings(corpus, dim, 7), dir_ / (stem + ".cemb"));
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  json train_config(const std::string& stem, const std::string& out) const {
    return {{"corpus", stem + ".ndjson"}, {"embeddings", stem + ".cemb"}, {"output_dir", out},
            {"hidden_size", 8},           {"batch_size", 8},              {"max_epochs", 5},
            {"min_epochs", 5},            {"learning_rate", 0.02},        {"seed", 4}};
  }

  fs::path dir_;
};

Corpus small_corpus(const std::string& name = "toy") {
  return template_corpus(name, {Template::Caused, Template::BecauseOf}, 16, 1, "v");
}

}  // namespace

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  EXPECT_NE(cli({"--help"}).out.find("experiment"), std::string::npos);
  EXPECT_EQ(cli({"train", "--help"}).code, kExitOk);
  EXPECT_EQ(cli({}).code, kExitValidation);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitValidation);
  EXPECT_EQ(cli({"validate"}).code, kExitValidation);
}

TEST_F(CliTest, ValidatePrintsStats) {
  add_corpus("toy", small_corpus());
  const Result r = cli({"validate", path("toy.ndjson").string(), "--embeddings",
                        path("toy.cemb").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("sentences        16"), std::string::npos) << r.out;
  // Caused/BecauseOf both carry markers; Caused causes span 2 tokens, BecauseOf 1.
  EXPECT_NE(r.out.find("0.0%"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("mean_cause_len   1.50"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("embeddings       ok"), std::string::npos) << r.out;
}

TEST_F(CliTest, ValidateRejectsCycle) {
  write(path("cycle.ndjson"),
        R"({"id":"a","dataset":"d","tokens":["x","y","z"],"labels":["C","O","E"],)"
        R"("heads":[1,2,-1],"rels":["dep","dep","root"]})"
        "\n"
        R"({"id":"b","dataset":"d","tokens":["x","y","z"],"labels":["C","O","E"],)"
        R"("heads":[1,2,0],"rels":["dep","dep","dep"]})"
        "\n");
  const Result r = cli({"validate", path("cycle.ndjson").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"validate", path("missing.ndjson").string()}).code, kExitValidation);
}

TEST_F(CliTest, TrainWritesFilesAndIsReproducible) {
  add_corpus("toy", small_corpus());
  write(path("run.json"), train_config("toy", "out").dump());
  const Result r = cli({"train", path("run.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"config.json", "checkpoint.cxck", "history.json"}) {
    EXPECT_TRUE(fs::exists(path("out") / f)) << f;
  }
  const json history = json::parse(slurp(path("out/history.json")));
  EXPECT_EQ(history.at("train_loss").size(), 5u);
  EXPECT_EQ(json::parse(slurp(path("out/config.json"))), train_config("toy", "out"));
  const std::string first = slurp(path("out/checkpoint.cxck"));
  ASSERT_EQ(cli({"train", path("run.json").string()}).code, kExitOk);
  EXPECT_EQ(slurp(path("out/checkpoint.cxck")), first);
}

TEST_F(CliTest, TrainLstmCrfHasTransitions) {
  add_corpus("toy", small_corpus());
  json cfg = train_config("toy", "crf");
  cfg["rnn_kind"] = "LSTM";
  cfg["decoder_kind"] = "CRF";
  write(path("run.json"), cfg.dump());
  ASSERT_EQ(cli({"train", path("run.json").string()}).code, kExitOk);
  const std::string bytes = slurp(path("crf/checkpoint.cxck"));
  EXPECT_NE(bytes.find("crf.transitions"), std::string::npos);
  const TrainedTagger t = read_checkpoint(bytes);
  ASSERT_TRUE(t.params.crf.has_value());
  EXPECT_EQ(t.params.crf->transitions.rows(), 3);
  EXPECT_EQ(t.config.rnn_kind, RnnKind::Lstm);
}

TEST_F(CliTest, TrainSeedsAndSplit) {
  add_corpus("toy", small_corpus());
  json cfg = train_config("toy", "multi");
  cfg["seeds"] = {1, 2};
  cfg["train_fraction"] = 0.75;
  write(path("run.json"), cfg.dump());
  ASSERT_EQ(cli({"train", path("run.json").string()}).code, kExitOk);
  for (const char* s : {"seed-1", "seed-2"}) {
    EXPECT_TRUE(fs::exists(path("multi") / s / "checkpoint.cxck"));
    const json eval = json::parse(slurp(path("multi") / s / "eval.json"));
    ASSERT_EQ(eval.size(), 2u);
    EXPECT_EQ(eval[0]["mode"], "PHRASE");
  }
}

TEST_F(CliTest, TrainConfigErrors) {
  add_corpus("toy", small_corpus());
  json cfg = train_config("toy", "out");
  cfg["hidden_sise"] = 4;
  write(path("typo.json"), cfg.dump());
  EXPECT_EQ(cli({"train", path("typo.json").string()}).code, kExitValidation);
  cfg = train_config("toy", "out");
  cfg["corpus"] = "nope.ndjson";
  write(path("nofile.json"), cfg.dump());
  EXPECT_EQ(cli({"train", path("nofile.json").string()}).code, kExitValidation);
  cfg = train_config("toy", "out");
  cfg["input_dim"] = 5;
  write(path("dim.json"), cfg.dump());
  EXPECT_EQ(cli({"train", path("dim.json").string()}).code, kExitValidation);
  write(path("broken.json"), "{not json");
  EXPECT_EQ(cli({"train", path("broken.json").string()}).code, kExitValidation);
}

TEST_F(CliTest, EvalPartialHitPhraseBeatsToken) {
  // Training data marks only the noun of "the ADJ NOUN caused ..." as the cause;
  // the gold corpus marks the amod-linked adjective too.
  const Corpus gold = template_corpus("gold", {Template::Caused}, 24, 3, "v");
  std::vector<Sentence> nouns_only = gold.sentences();
  for (Sentence& s : nouns_only) s.labels[1] = Label::O;
  add_corpus("nouns", Corpus("nouns", nouns_only));
  add_corpus("gold", gold);
  json cfg = train_config("nouns", "model");
  cfg["max_epochs"] = 40;
  cfg["min_epochs"] = 40;
  cfg["learning_rate"] = 0.05;
  write(path("run.json"), cfg.dump());
  ASSERT_EQ(cli({"train", path("run.json").string()}).code, kExitOk);

  const Result r =
      cli({"eval", "--checkpoint", path("model/checkpoint.cxck").string(), "--corpus",
           path("gold.ndjson").string(), "--embeddings", path("gold.cemb").string(), "--modes",
           "PHRASE,TOKEN_MACRO", "-o", path("eval.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json reports = json::parse(slurp(path("eval.json")));
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0]["mode"], "PHRASE");
  EXPECT_EQ(reports[1]["mode"], "TOKEN_MACRO");
  EXPECT_EQ(reports[0]["aggregate"]["f1"].get<double>(), 1.0);
  EXPECT_LT(reports[1]["aggregate"]["f1"].get<double>(), 1.0);
  EXPECT_GE(reports[0]["aggregate"]["f1"].get<double>(),
            reports[1]["aggregate"]["f1"].get<double>());

  // On its own training labels the tagger is perfect.
  const Result self =
      cli({"eval", "--checkpoint", path("model/checkpoint.cxck").string(), "--corpus",
           path("nouns.ndjson").string(), "--embeddings", path("nouns.cemb").string(), "--modes",
           "PHRASE,TOKEN_MACRO,TOKEN_MICRO", "-o", path("self.json").string()});
  ASSERT_EQ(self.code, kExitOk);
  for (const auto& rep : json::parse(slurp(path("self.json")))) {
    EXPECT_EQ(rep["aggregate"]["f1"].get<double>(), 1.0) << rep.dump();
  }
}

TEST_F(CliTest, EvalErrors) {
  add_corpus("toy", small_corpus());
  add_corpus("wide", small_corpus(), 6);
  write(path("run.json"), train_config("toy", "out").dump());
  ASSERT_EQ(cli({"train", path("run.json").string()}).code, kExitOk);
  const std::string ck = path("out/checkpoint.cxck").string();
  Result r = cli({"eval", "--checkpoint", ck, "--corpus", path("toy.ndjson").string(),
                  "--embeddings", path("absent.cemb").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("absent.cemb"), std::string::npos) << r.err;
  r = cli({"eval", "--checkpoint", ck, "--corpus", path("toy.ndjson").string(), "--embeddings",
           path("wide.cemb").string()});
  EXPECT_EQ(r.code, kExitValidation);
  r = cli({"eval", "--checkpoint", ck, "--corpus", path("toy.ndjson").string(), "--embeddings",
           path("toy.cemb").string(), "--modes", "SPAN"});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST_F(CliTest, ExperimentPairwiseAndRerun) {
  add_corpus("a", template_corpus("a", {Template::Caused, Template::Followed}, 16, 1, "a"));
  add_corpus("b", template_corpus("b", {Template::LeadsTo, Template::CameAfter}, 16, 2, "b"));
  const json spec = {
      {"corpora",
       {{{"name", "a"}, {"corpus", "a.ndjson"}, {"embeddings", "a.cemb"}},
        {{"name", "b"}, {"corpus", "b.ndjson"}, {"embeddings", "b.cemb"}}}},
      {"output_dir", "results"},
      {"tagger", {{"hidden_size", 6}, {"max_epochs", 3}, {"min_epochs", 3}, {"batch_size", 8}}},
      {"seeds", {0, 1}},
      {"experiments", {{{"kind", "pairwise"}, {"name", "transfer"}}}}};
  write(path("spec.json"), spec.dump());
  Result r = cli({"experiment", path("spec.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const fs::path out = path("results/transfer");
  for (const char* f : {"matrix.csv", "matrix.md", "raw_scores.json", "audit.log"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const std::string csv = slurp(out / "matrix.csv");
  EXPECT_EQ(csv.rfind("train\\test,a,b\n", 0), 0u) << csv;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const json manifest = json::parse(slurp(path("results/manifest.json")));
  EXPECT_EQ(manifest["completed"], json::array({"transfer"}));

  ASSERT_EQ(cli({"experiment", path("spec.json").string(), "--jobs", "2"}).code, kExitOk);
  EXPECT_EQ(slurp(out / "matrix.csv"), csv);

  const std::string md = slurp(out / "matrix.md");
  fs::remove(out / "matrix.md");
  ASSERT_EQ(cli({"report", path("results").string()}).code, kExitOk);
  EXPECT_EQ(slurp(out / "matrix.md"), md);
}

TEST_F(CliTest, ExperimentSpecValidatedBeforeTraining) {
  add_corpus("a", small_corpus("a"));
  add_corpus("b", small_corpus("b"));
  json spec = {{"corpora",
                {{{"name", "a"}, {"corpus", "a.ndjson"}, {"embeddings", "a.cemb"}},
                 {{"name", "b"}, {"corpus", "b.ndjson"}, {"embeddings", "b.cemb"}}}},
               {"output_dir", "results"},
               {"experiments",
                {{{"kind", "pairwise"}, {"name", "ok"}}, {{"kind", "bogus"}, {"name", "later"}}}}};
  write(path("spec.json"), spec.dump());
  Result r = cli({"experiment", path("spec.json").string()});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("bogus"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("results")));

  spec["experiments"] = {{{"kind", "size_sweep"}, {"name", "s"}, {"source", "zzz"},
                          {"targets", {"a"}}, {"fractions", {1.0}}}};
  write(path("spec.json"), spec.dump());
  EXPECT_EQ(cli({"experiment", path("spec.json").string()}).code, kExitValidation);
  EXPECT_FALSE(fs::exists(path("results")));
}

TEST_F(CliTest, IngestConll) {
  write(path("in.conll"),
        "# id = s1\n"
        "1\tthe\t3\tdet\tO\n"
        "2\tloud\t3\tamod\tE\n"
        "3\tchime\t4\tnsubj\tE\n"
        "4\tstartled\t0\troot\tO\n"
        "5\tme\t4\tdobj\tO\n"
        "\n"
        "# id = s2\n"
        "# explicit = true\n"
        "1\train\t2\tnsubj\tC\n"
        "2\tfell\t0\troot\tO\n");
  const Result r = cli({"ingest", path("in.conll").string(), "-o", path("out.ndjson").string(),
                        "--dataset", "mini"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Corpus c = load_corpus(path("out.ndjson"));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.name(), "mini");
  EXPECT_EQ(c[0].id, "s1");
  EXPECT_EQ(c[0].tokens[1].head, 2);
  EXPECT_EQ(c[0].tokens[3].head, kRootHead);
  EXPECT_EQ(c[0].labels[2], Label::E);
  EXPECT_EQ(c[1].explicit_flag, std::optional<bool>(true));

  write(path("bad.conll"), "1\tx\t5\tdep\tO\n");
  EXPECT_EQ(cli({"ingest", path("bad.conll").string(), "-o", path("bad.ndjson").string(),
                 "--dataset", "bad"})
                .code,
            kExitValidation);
}

TEST_F(CliTest, SubsampleAndHashEmbed) {
  add_corpus("toy", template_corpus("toy", {Template::Caused, Template::LeadsTo}, 20, 1, "v"));
  Result r = cli({"subsample", path("toy.ndjson").string(), "-o", path("sub.ndjson").string(),
                  "--require", "caused", "-n", "5", "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Corpus sub = load_corpus(path("sub.ndjson"));
  EXPECT_EQ(sub.size(), 5u);
  for (const auto& s : sub) EXPECT_EQ(s.tokens[3].surface, "caused");
  EXPECT_EQ(cli({"subsample", path("toy.ndjson").string(), "-o", path("x.ndjson").string(),
                 "--require", "caused", "-n", "11"})
                .code,
            kExitValidation);

  r = cli({"hash-embed", path("sub.ndjson").string(), "-o", path("sub.cemb").string(), "--dim",
           "12"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load_embedding_file(path("sub.cemb")).dim(), 12u);
}

TEST(CliBinary, ExitCodes) {
  const std::string bin = CAUSALX_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("validate /nonexistent/corpus.ndjson"), 1);
  EXPECT_EQ(run("report /nonexistent/results"), 1);
}
