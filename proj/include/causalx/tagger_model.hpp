#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "causalx/corpus.hpp"

namespace causalx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class RnnKind { Gru, Lstm };
enum class DecoderKind { Linear, Crf };

std::string_view to_string(RnnKind kind);
std::string_view to_string(DecoderKind kind);
RnnKind parse_rnn_kind(std::string_view text);
DecoderKind parse_decoder_kind(std::string_view text);

struct TaggerConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_size = 256;  // per direction; context rows are 2 * hidden_size
  RnnKind rnn_kind = RnnKind::Gru;
  DecoderKind decoder_kind = DecoderKind::Linear;
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 12;
  std::size_t min_epochs = 10;
  std::size_t patience = 3;
  std::uint64_t seed = 0;

  // Throws ValidationError on an inconsistent configuration.
  void validate() const;
  bool operator==(const TaggerConfig&) const = default;
};

std::size_t gate_count(RnnKind kind);

// One direction of the recurrent encoder. Gate blocks are stacked row-wise:
// GRU (update z, reset r, candidate n), LSTM (input i, forget f, cell g, output o).
struct RnnWeights {
  RnnKind kind = RnnKind::Gru;
  Matrix input;      // (gates*h) x d
  Matrix recurrent;  // (gates*h) x h
  Vector bias;       // gates*h

  Eigen::Index hidden() const { return recurrent.cols(); }
};

// Linear-chain transition scores over the three labels.
struct CrfWeights {
  Matrix transitions;  // 3 x 3, transitions(from, to)
  Vector start;        // 3
  Vector stop;         // 3
};

struct TaggerParams {
  RnnWeights forward;
  RnnWeights backward;
  Matrix out_weight;  // 3 x 2h
  Vector out_bias;    // 3
  std::optional<CrfWeights> crf;

  DecoderKind decoder() const { return crf ? DecoderKind::Crf : DecoderKind::Linear; }
  RnnKind rnn_kind() const { return forward.kind; }
  Eigen::Index input_dim() const { return forward.input.cols(); }
  Eigen::Index hidden() const { return forward.hidden(); }
};

using Gradients = TaggerParams;

// Weights ~ U(-k, k) with k = 1/sqrt(fan_in); biases and CRF scores zero.
TaggerParams init_params(const TaggerConfig& config, std::uint64_t seed);
TaggerParams zeros_like(const TaggerParams& params);

// Visits every parameter block in a fixed order as
// fn(name, span over the column-major values, rows, cols).
template <typename Params, typename Fn>
void for_each_block(Params& params, Fn&& fn) {
  auto visit = [&fn](std::string_view name, auto& m) {
    fn(name, std::span(m.data(), static_cast<std::size_t>(m.size())), m.rows(), m.cols());
  };
  visit("forward.input", params.forward.input);
  visit("forward.recurrent", params.forward.recurrent);
  visit("forward.bias", params.forward.bias);
  visit("backward.input", params.backward.input);
  visit("backward.recurrent", params.backward.recurrent);
  visit("backward.bias", params.backward.bias);
  visit("out.weight", params.out_weight);
  visit("out.bias", params.out_bias);
  if (params.crf) {
    visit("crf.transitions", params.crf->transitions);
    visit("crf.start", params.crf->start);
    visit("crf.stop", params.crf->stop);
  }
}

std::size_t parameter_count(const TaggerParams& params);
bool same_shape(const TaggerParams& a, const TaggerParams& b);
bool all_finite(const TaggerParams& params);

// a += scale * b, block by block.
void add_scaled(TaggerParams& a, const TaggerParams& b, double scale);
void scale(TaggerParams& a, double factor);

// Context row t is W_out * context_t + b_out; context is T x 2h.
Matrix emissions(const TaggerParams& params, const Matrix& context);

// Per-row argmax; the lowest label index wins ties.
std::vector<Label> argmax_labels(const Matrix& scores);

}  // namespace causalx
