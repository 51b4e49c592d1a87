#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "causalx/experiments.hpp"

namespace causalx {

// CSV of cell means at 6 decimals: header "train\test,<names...>", one row per
// training corpus.
std::string matrix_csv(const TransferMatrix& matrix);
// Markdown table, "mean ± std", the maximum of every column in bold.
std::string matrix_markdown(const TransferMatrix& matrix);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::string> row_names;
  std::vector<std::vector<double>> values;
};
CsvTable parse_csv_table(std::string_view text);

std::string sweep_csv(const SweepResult& sweep);
std::string sweep_markdown(const SweepResult& sweep);
std::string combined_csv(const CombinedResult& result);
std::string combined_markdown(const CombinedResult& result);

nlohmann::json to_json(const CellScores& cell);
nlohmann::json to_json(const TransferMatrix& matrix);
nlohmann::json to_json(const SweepResult& sweep);
nlohmann::json to_json(const CombinedResult& result);
nlohmann::json to_json(const CompositionResult& result);
TransferMatrix matrix_from_json(const nlohmann::json& j);
SweepResult sweep_from_json(const nlohmann::json& j);
CombinedResult combined_from_json(const nlohmann::json& j);
CompositionResult composition_from_json(const nlohmann::json& j);

// Each writes matrix.csv, matrix.md, raw_scores.json and audit.log into `dir`.
// Throws ValidationError on an empty result.
void render_report(const TransferMatrix& matrix, const std::filesystem::path& dir);
void render_report(const CombinedResult& result, const std::filesystem::path& dir);
void render_report(const SweepResult& sweep, const std::filesystem::path& dir);
void render_report(const CompositionResult& result, const std::filesystem::path& dir);

// Re-renders the tables of a result directory from its raw_scores.json.
void rerender_report(const std::filesystem::path& dir);

}  // namespace causalx
