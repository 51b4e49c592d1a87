#include "causalx/tagger_model.hpp"

#include <cmath>

#include "causalx/error.hpp"
#include "causalx/rng.hpp"

namespace causalx {

std::string_view to_string(RnnKind kind) { return kind == RnnKind::Gru ? "GRU" : "LSTM"; }
std::string_view to_string(DecoderKind kind) { return kind == DecoderKind::Linear ? "LINEAR" : "CRF"; }

RnnKind parse_rnn_kind(std::string_view text) {
  if (text == "GRU" || text == "gru") return RnnKind::Gru;
  if (text == "LSTM" || text == "lstm") return RnnKind::Lstm;
  throw ValidationError("unknown rnn_kind \"" + std::string(text) + "\" (expected GRU or LSTM)");
}

DecoderKind parse_decoder_kind(std::string_view text) {
  if (text == "LINEAR" || text == "linear") return DecoderKind::Linear;
  if (text == "CRF" || text == "crf") return DecoderKind::Crf;
  throw ValidationError("unknown decoder_kind \"" + std::string(text) + "\" (expected LINEAR or CRF)");
}

void TaggerConfig::validate() const {
  if (input_dim == 0) throw ValidationError("input_dim must be positive");
  if (hidden_size == 0) throw ValidationError("hidden_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a positive finite number");
  }
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  if (max_epochs == 0) throw ValidationError("max_epochs must be positive");
  if (min_epochs > max_epochs) throw ValidationError("min_epochs exceeds max_epochs");
  if (patience == 0) throw ValidationError("patience must be positive");
}

std::size_t gate_count(RnnKind kind) { return kind == RnnKind::Gru ? 3 : 4; }

namespace {

void fill_uniform(Matrix& m, double k, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-k, k);
}

RnnWeights init_direction(RnnKind kind, Eigen::Index d, Eigen::Index h, Rng& rng) {
  const auto g = static_cast<Eigen::Index>(gate_count(kind));
  RnnWeights w;
  w.kind = kind;
  w.input.resize(g * h, d);
  w.recurrent.resize(g * h, h);
  w.bias = Vector::Zero(g * h);
  fill_uniform(w.input, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  fill_uniform(w.recurrent, 1.0 / std::sqrt(static_cast<double>(h)), rng);
  return w;
}

template <typename Fn>
void zip_blocks(TaggerParams& a, const TaggerParams& b, Fn&& fn) {
  std::vector<std::span<const double>> rhs;
  for_each_block(b, [&](std::string_view, std::span<const double> v, auto, auto) { rhs.push_back(v); });
  std::size_t i = 0;
  for_each_block(a, [&](std::string_view, std::span<double> v, auto, auto) {
    fn(v, rhs[i++]);
  });
}

}  // namespace

TaggerParams init_params(const TaggerConfig& config, std::uint64_t seed) {
  config.validate();
  const auto d = static_cast<Eigen::Index>(config.input_dim);
  const auto h = static_cast<Eigen::Index>(config.hidden_size);
  Rng rng(seed);
  TaggerParams p;
  p.forward = init_direction(config.rnn_kind, d, h, rng);
  p.backward = init_direction(config.rnn_kind, d, h, rng);
  p.out_weight.resize(static_cast<Eigen::Index>(kNumLabels), 2 * h);
  fill_uniform(p.out_weight, 1.0 / std::sqrt(static_cast<double>(2 * h)), rng);
  p.out_bias = Vector::Zero(static_cast<Eigen::Index>(kNumLabels));
  if (config.decoder_kind == DecoderKind::Crf) {
    CrfWeights crf;
    crf.transitions = Matrix::Zero(3, 3);
    crf.start = Vector::Zero(3);
    crf.stop = Vector::Zero(3);
    p.crf = std::move(crf);
  }
  return p;
}

TaggerParams zeros_like(const TaggerParams& params) {
  TaggerParams z = params;
  for_each_block(z, [](std::string_view, std::span<double> v, auto, auto) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return z;
}

std::size_t parameter_count(const TaggerParams& params) {
  std::size_t n = 0;
  for_each_block(params, [&](std::string_view, std::span<const double> v, auto, auto) { n += v.size(); });
  return n;
}

bool same_shape(const TaggerParams& a, const TaggerParams& b) {
  if (a.forward.kind != b.forward.kind || a.backward.kind != b.backward.kind) return false;
  if (a.crf.has_value() != b.crf.has_value()) return false;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  for_each_block(a, [&](std::string_view, std::span<const double>, Eigen::Index r, Eigen::Index c) {
    shapes.emplace_back(r, c);
  });
  std::size_t i = 0;
  bool same = true;
  for_each_block(b, [&](std::string_view, std::span<const double>, Eigen::Index r, Eigen::Index c) {
    same = same && shapes[i++] == std::make_pair(r, c);
  });
  return same;
}

bool all_finite(const TaggerParams& params) {
  bool ok = true;
  for_each_block(params, [&](std::string_view, std::span<const double> v, auto, auto) {
    for (double x : v) ok = ok && std::isfinite(x);
  });
  return ok;
}

void add_scaled(TaggerParams& a, const TaggerParams& b, double factor) {
  zip_blocks(a, b, [factor](std::span<double> x, std::span<const double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += factor * y[i];
  });
}

void scale(TaggerParams& a, double factor) {
  for_each_block(a, [factor](std::string_view, std::span<double> v, auto, auto) {
    for (double& x : v) x *= factor;
  });
}

Matrix emissions(const TaggerParams& params, const Matrix& context) {
  if (context.cols() != params.out_weight.cols()) {
    throw ValidationError("context has " + std::to_string(context.cols()) +
                          " columns, decoder expects " + std::to_string(params.out_weight.cols()));
  }
  Matrix scores = context * params.out_weight.transpose();
  scores.rowwise() += params.out_bias.transpose();
  return scores;
}

std::vector<Label> argmax_labels(const Matrix& scores) {
  std::vector<Label> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(t, j) > scores(t, best)) best = j;
    }
    out[static_cast<std::size_t>(t)] = static_cast<Label>(best);
  }
  return out;
}

}  // namespace causalx
