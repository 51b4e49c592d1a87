#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "causalx/error.hpp"
#include "causalx/report.hpp"

using namespace causalx;
namespace fs = std::filesystem;

namespace {

TransferMatrix two_by_two() {
  TransferMatrix m;
  m.names = {"A", "B"};
  m.seeds = {0, 1};
  m.cells = {{make_cell({0.9, 0.8}), make_cell({0.3, 0.5})},
             {make_cell({0.6, 0.7}), make_cell({0.4, 0.45})}};
  m.audit = {"seed=0 train=A test=A", "seed=0 train=A test=B"};
  return m;
}

SweepResult small_sweep() {
  SweepResult s;
  s.source = "src";
  s.label = "fraction";
  s.axis = {0.5, 1.0};
  s.targets = {"T1", "T2"};
  s.seeds = {3};
  s.cells = {{make_cell({0.1234567}), make_cell({0.5})}, {make_cell({0.25}), make_cell({0.75})}};
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("causalx_report_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Matrix, CsvTwoByTwo) {
  EXPECT_EQ(matrix_csv(two_by_two()),
            "train\\test,A,B\n"
            "A,0.850000,0.400000\n"
            "B,0.650000,0.425000\n");
}

TEST(Matrix, MarkdownBoldsColumnMaxima) {
  const std::string md = matrix_markdown(two_by_two());
  // std of {0.9, 0.8} = sqrt(0.005) = 0.0707
  EXPECT_NE(md.find("| A | **0.850 ± 0.071** | 0.400 ± 0.141 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| B | 0.650 ± 0.071 | **0.425 ± 0.035** |"), std::string::npos) << md;
}

TEST(Matrix, CsvReloadMatchesToSixDecimals) {
  TransferMatrix m = two_by_two();
  m.cells[0][1] = make_cell({1.0 / 3.0, 2.0 / 7.0});
  const CsvTable t = parse_csv_table(matrix_csv(m));
  EXPECT_EQ(t.columns, m.names);
  EXPECT_EQ(t.row_names, m.names);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_NEAR(t.values[i][j], m.cells[i][j].mean, 5e-7);
    }
  }
}

TEST(Matrix, JsonRoundTrip) {
  const TransferMatrix m = two_by_two();
  const TransferMatrix back = matrix_from_json(to_json(m));
  EXPECT_EQ(back.names, m.names);
  EXPECT_EQ(back.seeds, m.seeds);
  EXPECT_EQ(back.audit, m.audit);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(back.cells[i][j].per_seed, m.cells[i][j].per_seed);
    }
  }
  EXPECT_EQ(to_json(m)["kind"], "pairwise");
}

TEST(Sweep, EmptyRefusesToRender) {
  SweepResult empty;
  EXPECT_THROW(render_report(empty, fresh_dir("empty")), ValidationError);
  EXPECT_THROW(render_report(TransferMatrix{}, fresh_dir("empty_m")), ValidationError);
}

TEST(Sweep, CsvAndMarkdown) {
  const SweepResult s = small_sweep();
  EXPECT_EQ(sweep_csv(s), "fraction,T1,T2\n0.5,0.123457,0.500000\n1,0.250000,0.750000\n");
  const std::string md = sweep_markdown(s);
  EXPECT_NE(md.find("| 1 | **0.250 ± 0.000** | **0.750 ± 0.000** |"), std::string::npos) << md;
}

TEST(Files, RenderAndRerenderAreIdentical) {
  const fs::path dir = fresh_dir("pairwise");
  render_report(two_by_two(), dir);
  for (const char* f : {"matrix.csv", "matrix.md", "raw_scores.json", "audit.log"}) {
    ASSERT_TRUE(fs::exists(dir / f)) << f;
  }
  const std::string csv = slurp(dir / "matrix.csv"), md = slurp(dir / "matrix.md");
  const std::string raw = slurp(dir / "raw_scores.json");
  fs::remove(dir / "matrix.csv");
  fs::remove(dir / "matrix.md");
  rerender_report(dir);
  EXPECT_EQ(slurp(dir / "matrix.csv"), csv);
  EXPECT_EQ(slurp(dir / "matrix.md"), md);
  EXPECT_EQ(slurp(dir / "raw_scores.json"), raw);
  EXPECT_EQ(slurp(dir / "audit.log"), "seed=0 train=A test=A\nseed=0 train=A test=B\n");
  fs::remove_all(dir);
}

TEST(Files, RerenderEveryKind) {
  CombinedResult c;
  c.target = "T";
  c.others = {"X", "Y"};
  c.seeds = {0, 1};
  c.baseline = make_cell({0.5, 0.5});
  c.augmented = make_cell({0.6, 0.6});
  c.delta = 0.1;
  c.pct_change = 20.0;
  c.significance.t = INFINITY;
  c.significance.p = 0.0;
  c.significance.decision = Decision::Reject;
  CompositionResult comp{small_sweep(), small_sweep()};
  comp.implicit_only.label = "implicit";
  comp.explicit_only.label = "explicit";

  const fs::path dc = fresh_dir("combined"), ds = fresh_dir("sweep"), dk = fresh_dir("comp");
  render_report(c, dc);
  render_report(small_sweep(), ds);
  render_report(comp, dk);
  EXPECT_NE(slurp(dc / "raw_scores.json").find("\"inf\""), std::string::npos);
  EXPECT_NE(slurp(dc / "matrix.md").find("REJECT"), std::string::npos);
  for (const fs::path& d : {dc, ds, dk}) {
    const std::string csv = slurp(d / "matrix.csv"), md = slurp(d / "matrix.md");
    rerender_report(d);
    EXPECT_EQ(slurp(d / "matrix.csv"), csv) << d;
    EXPECT_EQ(slurp(d / "matrix.md"), md) << d;
    fs::remove_all(d);
  }
}

TEST(Files, RerenderRejectsBadInput) {
  const fs::path dir = fresh_dir("bad");
  EXPECT_THROW(rerender_report(dir), ValidationError);
  fs::create_directories(dir);
  std::ofstream(dir / "raw_scores.json") << R"({"kind": "histogram"})";
  EXPECT_THROW(rerender_report(dir), ValidationError);
  fs::remove_all(dir);
}

TEST(Csv, ParseErrors) {
  EXPECT_THROW(parse_csv_table(""), ValidationError);
  EXPECT_THROW(parse_csv_table("a,b\nx,1,2\n"), ValidationError);
  EXPECT_THROW(parse_csv_table("a,b\nx,abc\n"), ValidationError);
}
