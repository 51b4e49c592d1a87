#include "oracles.hpp"

#include <cmath>
#include <limits>

#include "causalx/kernels.hpp"
#include "causalx/rng.hpp"

namespace causalx::testing {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Row `row` of W times v.
double dot_row(const Matrix& w, Eigen::Index row, const std::vector<double>& v) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < w.cols(); ++k) s += w(row, k) * v[static_cast<std::size_t>(k)];
  return s;
}

}  // namespace

double brute_path_score(const Matrix& e, const CrfWeights& crf, const std::vector<int>& path) {
  double s = crf.start(path.front()) + crf.stop(path.back());
  for (std::size_t t = 0; t < path.size(); ++t) {
    s += e(static_cast<Eigen::Index>(t), path[t]);
    if (t > 0) s += crf.transitions(path[t - 1], path[t]);
  }
  return s;
}

std::vector<std::vector<int>> all_paths(int length) {
  std::vector<std::vector<int>> out;
  std::vector<int> path(static_cast<std::size_t>(length), 0);
  while (true) {
    out.push_back(path);
    int k = length - 1;
    while (k >= 0 && path[static_cast<std::size_t>(k)] == 2) {
      path[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++path[static_cast<std::size_t>(k)];
  }
  return out;
}

double brute_log_partition(const Matrix& e, const CrfWeights& crf, int length) {
  std::vector<double> scores;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : all_paths(length)) {
    scores.push_back(brute_path_score(e, crf, p));
    best = std::max(best, scores.back());
  }
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - best);
  return best + std::log(sum);
}

std::vector<Label> brute_viterbi(const Matrix& e, const CrfWeights& crf, int length) {
  std::vector<int> best_path;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : all_paths(length)) {
    const double s = brute_path_score(e, crf, p);
    if (s > best) {
      best = s;
      best_path = p;
    }
  }
  std::vector<Label> out;
  for (int k : best_path) out.push_back(kAllLabels[static_cast<std::size_t>(k)]);
  return out;
}

std::vector<double> reference_gru_step(const RnnWeights& w, const std::vector<double>& x,
                                       const std::vector<double>& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  std::vector<double> z(h.size()), r(h.size()), rh(h.size()), out(h.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    z[j] = sigmoid(dot_row(w.input, j, x) + dot_row(w.recurrent, j, h) + w.bias(j));
    r[j] = sigmoid(dot_row(w.input, n + j, x) + dot_row(w.recurrent, n + j, h) + w.bias(n + j));
  }
  for (Eigen::Index j = 0; j < n; ++j) rh[j] = r[j] * h[j];
  for (Eigen::Index j = 0; j < n; ++j) {
    const double cand = std::tanh(dot_row(w.input, 2 * n + j, x) +
                                  dot_row(w.recurrent, 2 * n + j, rh) + w.bias(2 * n + j));
    out[j] = (1.0 - z[j]) * h[j] + z[j] * cand;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> reference_lstm_step(
    const RnnWeights& w, const std::vector<double>& x, const std::vector<double>& h,
    const std::vector<double>& c) {
  const auto n = static_cast<Eigen::Index>(h.size());
  std::vector<double> h_out(h.size()), c_out(h.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    auto pre = [&](Eigen::Index gate) {
      const Eigen::Index row = gate * n + j;
      return dot_row(w.input, row, x) + dot_row(w.recurrent, row, h) + w.bias(row);
    };
    const double i = sigmoid(pre(0)), f = sigmoid(pre(1)), g = std::tanh(pre(2)),
                 o = sigmoid(pre(3));
    c_out[j] = f * c[j] + i * g;
    h_out[j] = o * std::tanh(c_out[j]);
  }
  return {h_out, c_out};
}

std::vector<BlockError> gradient_check(const TaggerParams& params, const Matrix& inputs,
                                       const std::vector<Label>& gold, double step) {
  Gradients analytic = zeros_like(params);
  sentence_loss_and_gradient(params, inputs, gold, analytic);

  std::vector<std::vector<double>> analytic_blocks;
  for_each_block(analytic, [&](std::string_view, std::span<const double> v, auto, auto) {
    analytic_blocks.emplace_back(v.begin(), v.end());
  });

  TaggerParams probe = params;
  std::vector<BlockError> out;
  std::size_t block = 0;
  for_each_block(probe, [&](std::string_view name, std::span<double> v, auto, auto) {
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double saved = v[k];
      v[k] = saved + step;
      const double up = sentence_loss(probe, inputs, gold);
      v[k] = saved - step;
      const double down = sentence_loss(probe, inputs, gold);
      v[k] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic_blocks[block][k];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
    }
    const double denom = std::sqrt(a2) + std::sqrt(n2);
    out.push_back({std::string(name), denom == 0.0 ? 0.0 : std::sqrt(diff2) / denom});
    ++block;
  });
  return out;
}

GradCase random_grad_case(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x67726164));
  TaggerConfig config;
  config.input_dim = 1 + rng.uniform_index(4);
  config.hidden_size = 1 + rng.uniform_index(3);
  config.rnn_kind = seed % 2 == 0 ? RnnKind::Gru : RnnKind::Lstm;
  config.decoder_kind = (seed / 2) % 2 == 0 ? DecoderKind::Linear : DecoderKind::Crf;
  const auto length = static_cast<Eigen::Index>(1 + rng.uniform_index(4));

  GradCase c;
  c.params = init_params(config, seed);
  // Nonzero biases and transitions so every block has a nontrivial gradient.
  for_each_block(c.params, [&](std::string_view, std::span<double> v, auto, auto) {
    for (double& x : v) x += rng.uniform(-0.5, 0.5);
  });
  c.inputs = Matrix(length, static_cast<Eigen::Index>(config.input_dim));
  for (Eigen::Index i = 0; i < c.inputs.size(); ++i) c.inputs.data()[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index t = 0; t < length; ++t) c.gold.push_back(kAllLabels[rng.uniform_index(3)]);
  c.description = std::string(to_string(config.rnn_kind)) + "/" +
                  std::string(to_string(config.decoder_kind)) + " d=" +
                  std::to_string(config.input_dim) + " h=" + std::to_string(config.hidden_size) +
                  " T=" + std::to_string(length);
  return c;
}

}  // namespace causalx::testing
