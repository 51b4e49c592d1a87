#include "causalx/checkpoint.hpp"

#include <set>

#include "binary_io.hpp"
#include "causalx/error.hpp"

namespace causalx {

namespace {

constexpr std::string_view kMagic = "CXCK";
constexpr std::uint32_t kVersion = 1;

nlohmann::json history_json(const TrainHistory& h) {
  return nlohmann::json::parse(history_to_json(h));
}

TrainHistory history_from(const nlohmann::json& j) {
  TrainHistory h;
  h.train_loss = j.at("train_loss").get<std::vector<double>>();
  h.validation_metric = j.at("validation_metric").get<std::vector<double>>();
  h.best_epoch = j.at("best_epoch").get<std::size_t>();
  h.stop_epoch = j.at("stop_epoch").get<std::size_t>();
  h.stop_reason = j.at("stop_reason").get<std::string>() == "early" ? StopReason::Early
                                                                     : StopReason::MaxEpochs;
  h.n_train = j.at("n_train").get<std::size_t>();
  h.n_validation = j.at("n_validation").get<std::size_t>();
  return h;
}

}  // namespace

nlohmann::json config_to_json(const TaggerConfig& c) {
  nlohmann::ordered_json j;
  j["input_dim"] = c.input_dim;
  j["hidden_size"] = c.hidden_size;
  j["rnn_kind"] = std::string(to_string(c.rnn_kind));
  j["decoder_kind"] = std::string(to_string(c.decoder_kind));
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["min_epochs"] = c.min_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  return nlohmann::json(j);
}

TaggerConfig config_from_json(const nlohmann::json& j, TaggerConfig c) {
  if (!j.is_object()) throw ValidationError("tagger config must be a JSON object");
  static const std::set<std::string> known = {"input_dim",  "hidden_size", "rnn_kind",
                                              "decoder_kind", "learning_rate", "batch_size",
                                              "max_epochs", "min_epochs",  "patience",
                                              "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown tagger config key \"" + key + "\"");
  }
  try {
    if (j.contains("input_dim")) c.input_dim = j["input_dim"].get<std::size_t>();
    if (j.contains("hidden_size")) c.hidden_size = j["hidden_size"].get<std::size_t>();
    if (j.contains("rnn_kind")) c.rnn_kind = parse_rnn_kind(j["rnn_kind"].get<std::string>());
    if (j.contains("decoder_kind")) {
      c.decoder_kind = parse_decoder_kind(j["decoder_kind"].get<std::string>());
    }
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<std::size_t>();
    if (j.contains("min_epochs")) c.min_epochs = j["min_epochs"].get<std::size_t>();
    if (j.contains("patience")) c.patience = j["patience"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("tagger config: ") + e.what());
  }
  return c;
}

std::string write_checkpoint(const TrainedTagger& tagger) {
  nlohmann::ordered_json meta;
  meta["config"] = config_to_json(tagger.config);
  meta["history"] = history_json(tagger.history);
  meta["embedding_dim"] = tagger.embedding_dim;
  const std::string meta_text = meta.dump();

  detail::ByteWriter out;
  out.bytes(kMagic);
  out.u32(kVersion);
  out.u32(static_cast<std::uint32_t>(meta_text.size()));
  out.bytes(meta_text);
  std::uint32_t n_blocks = 0;
  for_each_block(tagger.params, [&](std::string_view, auto, auto, auto) { ++n_blocks; });
  out.u32(n_blocks);
  for_each_block(tagger.params, [&](std::string_view name, std::span<const double> v,
                                    Eigen::Index rows, Eigen::Index cols) {
    out.u16(static_cast<std::uint16_t>(name.size()));
    out.bytes(name);
    out.u32(static_cast<std::uint32_t>(rows));
    out.u32(static_cast<std::uint32_t>(cols));
    for (double x : v) out.f64(x);
  });
  return out.take();
}

TrainedTagger read_checkpoint(std::string_view bytes) {
  detail::ByteReader in(bytes, "checkpoint");
  if (bytes.size() < 4 || in.bytes(4) != kMagic) {
    throw ValidationError("checkpoint: bad magic (expected \"CXCK\")");
  }
  const std::uint32_t version = in.u32();
  if (version != kVersion) {
    throw ValidationError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t meta_len = in.u32();
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in.bytes(meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("checkpoint metadata: ") + e.what());
  }
  TrainedTagger t;
  t.config = config_from_json(meta.at("config"));
  t.history = history_from(meta.at("history"));
  t.embedding_dim = meta.at("embedding_dim").get<std::size_t>();
  t.params = init_params(t.config, 0);

  const std::uint32_t n_blocks = in.u32();
  std::uint32_t seen = 0;
  for_each_block(t.params, [&](std::string_view name, std::span<double> v, Eigen::Index rows,
                               Eigen::Index cols) {
    if (seen++ >= n_blocks) throw ValidationError("checkpoint is missing block " + std::string(name));
    const std::uint16_t name_len = in.u16();
    const std::string_view stored = in.bytes(name_len);
    const std::uint32_t r = in.u32();
    const std::uint32_t c = in.u32();
    if (stored != name || r != rows || c != cols) {
      throw ValidationError("checkpoint block " + std::string(stored) + " (" + std::to_string(r) +
                            "x" + std::to_string(c) + ") does not match expected " +
                            std::string(name) + " (" + std::to_string(rows) + "x" +
                            std::to_string(cols) + ")");
    }
    for (double& x : v) x = in.f64();
  });
  if (seen != n_blocks || in.remaining() != 0) {
    throw ValidationError("checkpoint has unexpected trailing data");
  }
  if (!all_finite(t.params)) throw ValidationError("checkpoint contains non-finite parameters");
  return t;
}

void save_checkpoint(const TrainedTagger& tagger, const std::filesystem::path& path) {
  detail::write_binary_file(path.string(), write_checkpoint(tagger));
}

TrainedTagger load_checkpoint(const std::filesystem::path& path) {
  try {
    return read_checkpoint(detail::read_binary_file(path.string()));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace causalx
