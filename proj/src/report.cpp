#include "causalx/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "causalx/error.hpp"

namespace causalx {

namespace {

using nlohmann::json;

std::string fixed(double v, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string axis_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// JSON has no infinities; those are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_string()) return std::strtod(j.get<std::string>().c_str(), nullptr);
  return j.get<double>();
}

std::string markdown_cell(const CellScores& c, bool bold) {
  std::string s = fixed(c.mean, 3) + " ± " + fixed(c.stddev, 3);
  return bold ? "**" + s + "**" : s;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeFailure("error writing " + path.string());
}

void write_bundle(const std::filesystem::path& dir, const std::string& csv, const std::string& md,
                  const json& raw, const std::vector<std::string>& audit) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "matrix.csv", csv);
  write_text(dir / "matrix.md", md);
  write_text(dir / "raw_scores.json", raw.dump(2) + "\n");
  write_text(dir / "audit.log", join_lines(audit));
}

json seeds_json(const std::vector<std::uint64_t>& seeds) { return seeds; }

CellScores cell_from_json(const json& j) {
  std::vector<double> per_seed;
  for (const auto& v : j.at("per_seed")) per_seed.push_back(number_from(v));
  return make_cell(std::move(per_seed));
}

// Bold flags for the maximum of every column of a [row][col] grid.
std::vector<std::vector<bool>> column_maxima(const std::vector<std::vector<CellScores>>& grid) {
  std::vector<std::vector<bool>> bold(grid.size());
  if (grid.empty()) return bold;
  const std::size_t cols = grid.front().size();
  for (auto& row : bold) row.assign(cols, false);
  for (std::size_t c = 0; c < cols; ++c) {
    double best = -INFINITY;
    for (const auto& row : grid) best = std::max(best, row[c].mean);
    for (std::size_t r = 0; r < grid.size(); ++r) bold[r][c] = grid[r][c].mean == best;
  }
  return bold;
}

std::string markdown_grid(const std::string& corner, const std::vector<std::string>& row_names,
                          const std::vector<std::string>& col_names,
                          const std::vector<std::vector<CellScores>>& grid,
                          const std::vector<std::vector<bool>>& bold) {
  std::ostringstream md;
  md << "| " << corner << " |";
  for (const auto& c : col_names) md << ' ' << c << " |";
  md << "\n|---|";
  for (std::size_t c = 0; c < col_names.size(); ++c) md << "---|";
  md << '\n';
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    md << "| " << row_names[r] << " |";
    for (std::size_t c = 0; c < col_names.size(); ++c) {
      md << ' ' << markdown_cell(grid[r][c], bold[r][c]) << " |";
    }
    md << '\n';
  }
  return md.str();
}

std::string csv_grid(const std::string& corner, const std::vector<std::string>& row_names,
                     const std::vector<std::string>& col_names,
                     const std::vector<std::vector<CellScores>>& grid) {
  std::ostringstream csv;
  csv << corner;
  for (const auto& c : col_names) csv << ',' << c;
  csv << '\n';
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    csv << row_names[r];
    for (const auto& cell : grid[r]) csv << ',' << fixed(cell.mean);
    csv << '\n';
  }
  return csv.str();
}

std::vector<std::string> axis_names(const SweepResult& sweep) {
  std::vector<std::string> names;
  for (double a : sweep.axis) names.push_back(axis_value(a));
  return names;
}

void check_sweep(const SweepResult& sweep) {
  if (sweep.axis.empty() || sweep.targets.empty() || sweep.cells.size() != sweep.axis.size()) {
    throw ValidationError("refusing to render an empty sweep");
  }
}

}  // namespace

std::string matrix_csv(const TransferMatrix& m) {
  return csv_grid("train\\test", m.names, m.names, m.cells);
}

std::string matrix_markdown(const TransferMatrix& m) {
  return markdown_grid("train \\ test", m.names, m.names, m.cells, column_maxima(m.cells));
}

CsvTable parse_csv_table(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream s(l);
    while (std::getline(s, field, ',')) fields.push_back(field);
    if (!l.empty() && l.back() == ',') fields.emplace_back();
    return fields;
  };
  if (!std::getline(in, line) || line.empty()) throw ValidationError("CSV table has no header");
  auto header = split(line);
  table.columns.assign(header.begin() + 1, header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ValidationError("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
    }
    table.row_names.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(fields[i].c_str(), &end);
      if (fields[i].empty() || *end != '\0') {
        throw ValidationError("CSV line " + std::to_string(line_no) + ": '" + fields[i] +
                              "' is not a number");
      }
      row.push_back(v);
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

std::string sweep_csv(const SweepResult& sweep) {
  return csv_grid(sweep.label, axis_names(sweep), sweep.targets, sweep.cells);
}

std::string sweep_markdown(const SweepResult& sweep) {
  return "Training source: " + sweep.source + "\n\n" +
         markdown_grid(sweep.label + " \\ test", axis_names(sweep), sweep.targets, sweep.cells,
                       column_maxima(sweep.cells));
}

std::string combined_csv(const CombinedResult& r) {
  std::ostringstream csv;
  csv << "target,baseline_mean,baseline_std,augmented_mean,augmented_std,delta,pct_change,t,df,p,"
         "reject\n";
  csv << r.target << ',' << fixed(r.baseline.mean) << ',' << fixed(r.baseline.stddev) << ','
      << fixed(r.augmented.mean) << ',' << fixed(r.augmented.stddev) << ',' << fixed(r.delta)
      << ',' << fixed(r.pct_change) << ',' << fixed(r.significance.t) << ','
      << fixed(r.significance.df) << ',' << fixed(r.significance.p) << ','
      << (r.significance.decision == Decision::Reject ? 1 : 0) << '\n';
  return csv.str();
}

std::string combined_markdown(const CombinedResult& r) {
  std::string others;
  for (const auto& o : r.others) others += (others.empty() ? "" : ", ") + o;
  const bool better = r.augmented.mean > r.baseline.mean;
  std::ostringstream md;
  md << "| test | train | score |\n|---|---|---|\n";
  md << "| " << r.target << " | " << r.target << " (train split) | "
     << markdown_cell(r.baseline, !better) << " |\n";
  md << "| " << r.target << " | " << r.target << " + " << (others.empty() ? "(none)" : others)
     << " | " << markdown_cell(r.augmented, better) << " |\n\n";
  md << "Change: " << fixed(r.delta, 3) << " (" << fixed(r.pct_change, 2) << "%)";
  if (r.seeds.size() >= 2) {
    md << ", Welch t = " << fixed(r.significance.t, 3) << ", p = " << fixed(r.significance.p, 3)
       << ", " << to_string(r.significance.decision);
  }
  md << '\n';
  return md.str();
}

json to_json(const CellScores& cell) {
  json per_seed = json::array();
  for (double v : cell.per_seed) per_seed.push_back(number(v));
  return {{"per_seed", per_seed}, {"mean", number(cell.mean)}, {"stddev", number(cell.stddev)}};
}

json to_json(const TransferMatrix& m) {
  json cells = json::array();
  for (const auto& row : m.cells) {
    json r = json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    cells.push_back(r);
  }
  return {{"kind", "pairwise"}, {"names", m.names}, {"seeds", seeds_json(m.seeds)},
          {"cells", cells},     {"audit", m.audit}};
}

json to_json(const SweepResult& s) {
  json cells = json::array();
  for (const auto& row : s.cells) {
    json r = json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    cells.push_back(r);
  }
  return {{"kind", "size_sweep"}, {"source", s.source}, {"label", s.label},
          {"axis", s.axis},       {"targets", s.targets}, {"seeds", seeds_json(s.seeds)},
          {"cells", cells},       {"audit", s.audit}};
}

json to_json(const CombinedResult& r) {
  const auto& sig = r.significance;
  return {{"kind", "combined"},
          {"target", r.target},
          {"others", r.others},
          {"seeds", seeds_json(r.seeds)},
          {"baseline", to_json(r.baseline)},
          {"augmented", to_json(r.augmented)},
          {"delta", number(r.delta)},
          {"pct_change", number(r.pct_change)},
          {"significance",
           {{"mean_a", number(sig.mean_a)},
            {"mean_b", number(sig.mean_b)},
            {"t", number(sig.t)},
            {"df", number(sig.df)},
            {"p", number(sig.p)},
            {"decision", std::string(to_string(sig.decision))}}},
          {"audit", r.audit}};
}

json to_json(const CompositionResult& r) {
  return {{"kind", "composition"},
          {"implicit_only", to_json(r.implicit_only)},
          {"explicit_only", to_json(r.explicit_only)}};
}

TransferMatrix matrix_from_json(const json& j) {
  TransferMatrix m;
  m.names = j.at("names").get<std::vector<std::string>>();
  m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& row : j.at("cells")) {
    std::vector<CellScores> r;
    for (const auto& c : row) r.push_back(cell_from_json(c));
    m.cells.push_back(std::move(r));
  }
  m.audit = j.at("audit").get<std::vector<std::string>>();
  return m;
}

SweepResult sweep_from_json(const json& j) {
  SweepResult s;
  s.source = j.at("source").get<std::string>();
  s.label = j.at("label").get<std::string>();
  s.axis = j.at("axis").get<std::vector<double>>();
  s.targets = j.at("targets").get<std::vector<std::string>>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  for (const auto& row : j.at("cells")) {
    std::vector<CellScores> r;
    for (const auto& c : row) r.push_back(cell_from_json(c));
    s.cells.push_back(std::move(r));
  }
  s.audit = j.at("audit").get<std::vector<std::string>>();
  return s;
}

CombinedResult combined_from_json(const json& j) {
  CombinedResult r;
  r.target = j.at("target").get<std::string>();
  r.others = j.at("others").get<std::vector<std::string>>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.baseline = cell_from_json(j.at("baseline"));
  r.augmented = cell_from_json(j.at("augmented"));
  r.delta = number_from(j.at("delta"));
  r.pct_change = number_from(j.at("pct_change"));
  const auto& sig = j.at("significance");
  r.significance.mean_a = number_from(sig.at("mean_a"));
  r.significance.mean_b = number_from(sig.at("mean_b"));
  r.significance.t = number_from(sig.at("t"));
  r.significance.df = number_from(sig.at("df"));
  r.significance.p = number_from(sig.at("p"));
  r.significance.decision = sig.at("decision").get<std::string>() == "REJECT"
                                ? Decision::Reject
                                : Decision::FailToReject;
  r.audit = j.at("audit").get<std::vector<std::string>>();
  return r;
}

CompositionResult composition_from_json(const json& j) {
  return {sweep_from_json(j.at("implicit_only")), sweep_from_json(j.at("explicit_only"))};
}

void render_report(const TransferMatrix& m, const std::filesystem::path& dir) {
  if (m.names.empty() || m.cells.size() != m.names.size()) {
    throw ValidationError("refusing to render an empty transfer matrix");
  }
  write_bundle(dir, matrix_csv(m), matrix_markdown(m), to_json(m), m.audit);
}

void render_report(const CombinedResult& r, const std::filesystem::path& dir) {
  if (r.seeds.empty() || r.baseline.per_seed.empty()) {
    throw ValidationError("refusing to render an empty combined result");
  }
  write_bundle(dir, combined_csv(r), combined_markdown(r), to_json(r), r.audit);
}

void render_report(const SweepResult& s, const std::filesystem::path& dir) {
  check_sweep(s);
  write_bundle(dir, sweep_csv(s), sweep_markdown(s), to_json(s), s.audit);
}

void render_report(const CompositionResult& r, const std::filesystem::path& dir) {
  check_sweep(r.implicit_only);
  check_sweep(r.explicit_only);
  const SweepResult& imp = r.implicit_only;
  const SweepResult& exp = r.explicit_only;
  if (imp.axis != exp.axis || imp.targets != exp.targets) {
    throw ValidationError("implicit and explicit sweeps cover different sizes or targets");
  }
  std::vector<std::string> rows;
  std::vector<std::vector<CellScores>> grid;
  for (std::size_t a = 0; a < imp.axis.size(); ++a) {
    rows.push_back("implicit:" + axis_value(imp.axis[a]));
    grid.push_back(imp.cells[a]);
    rows.push_back("explicit:" + axis_value(exp.axis[a]));
    grid.push_back(exp.cells[a]);
  }
  // Bold the better subset at each size.
  std::vector<std::vector<bool>> bold(grid.size(), std::vector<bool>(imp.targets.size()));
  for (std::size_t a = 0; a < imp.axis.size(); ++a) {
    for (std::size_t t = 0; t < imp.targets.size(); ++t) {
      const double i = grid[2 * a][t].mean, e = grid[2 * a + 1][t].mean;
      bold[2 * a][t] = i >= e;
      bold[2 * a + 1][t] = e >= i;
    }
  }
  std::vector<std::string> audit = imp.audit;
  audit.insert(audit.end(), exp.audit.begin(), exp.audit.end());
  write_bundle(dir, csv_grid("subset:size", rows, imp.targets, grid),
               "Training source: " + imp.source + "\n\n" +
                   markdown_grid("subset:size \\ test", rows, imp.targets, grid, bold),
               to_json(r), audit);
}

void rerender_report(const std::filesystem::path& dir) {
  const auto path = dir / "raw_scores.json";
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pairwise") {
      render_report(matrix_from_json(j), dir);
    } else if (kind == "combined") {
      render_report(combined_from_json(j), dir);
    } else if (kind == "size_sweep") {
      render_report(sweep_from_json(j), dir);
    } else if (kind == "composition") {
      render_report(composition_from_json(j), dir);
    } else {
      throw ValidationError(path.string() + ": unknown result kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace causalx
