#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "causalx/train.hpp"

namespace causalx {

nlohmann::json config_to_json(const TaggerConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
TaggerConfig config_from_json(const nlohmann::json& j, TaggerConfig base = {});

// Binary checkpoint, little-endian (layout in docs/formats.md):
//   "CXCK" | u32 version=1 | u32 json_len | config+history JSON |
//   u32 n_blocks | n_blocks x ( u16 name_len | name | u32 rows | u32 cols |
//   rows*cols f64, column-major )
std::string write_checkpoint(const TrainedTagger& tagger);
TrainedTagger read_checkpoint(std::string_view bytes);
void save_checkpoint(const TrainedTagger& tagger, const std::filesystem::path& path);
TrainedTagger load_checkpoint(const std::filesystem::path& path);

}  // namespace causalx
