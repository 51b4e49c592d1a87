#include "causalx/decoder.hpp"

#include <cmath>
#include <limits>

#include "causalx/error.hpp"

namespace causalx {

namespace {

using Eigen::Index;
constexpr Index kL = static_cast<Index>(kNumLabels);

double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

void check_emissions(const Matrix& emissions, std::size_t rows) {
  if (emissions.cols() != kL) throw ValidationError("emission matrix must have 3 columns");
  if (static_cast<std::size_t>(emissions.rows()) != rows) {
    throw ValidationError("emission rows (" + std::to_string(emissions.rows()) +
                          ") differ from sequence length (" + std::to_string(rows) + ")");
  }
}

// Length of the unmasked prefix; rejects masks that are not a prefix.
Index prefix_length(std::span<const std::uint8_t> mask) {
  Index len = 0;
  while (static_cast<std::size_t>(len) < mask.size() && mask[static_cast<std::size_t>(len)]) ++len;
  for (std::size_t t = static_cast<std::size_t>(len); t < mask.size(); ++t) {
    if (mask[t]) throw ValidationError("CRF mask must be a contiguous prefix");
  }
  if (len == 0) throw ValidationError("CRF over an empty sequence");
  return len;
}

void check_crf(const CrfWeights& crf) {
  if (crf.transitions.rows() != kL || crf.transitions.cols() != kL || crf.start.size() != kL ||
      crf.stop.size() != kL) {
    throw ValidationError("CRF weights must be 3x3 transitions with 3-vector start/stop");
  }
}

// alpha.row(t)(j) = log-sum of all prefix paths ending in j at t.
Matrix forward_scores(const Matrix& e, const CrfWeights& crf, Index len) {
  Matrix alpha(len, kL);
  alpha.row(0) = crf.start.transpose() + e.row(0);
  for (Index t = 1; t < len; ++t) {
    for (Index j = 0; j < kL; ++j) {
      alpha(t, j) = log_sum_exp(alpha.row(t - 1).transpose() + crf.transitions.col(j)) + e(t, j);
    }
  }
  return alpha;
}

}  // namespace

Mask prefix_mask(std::size_t length, std::size_t padded_length) {
  Mask m(padded_length, 0);
  for (std::size_t t = 0; t < length && t < padded_length; ++t) m[t] = 1;
  return m;
}

XentResult xent_loss(const Matrix& emissions, std::span<const Label> gold,
                     std::span<const std::uint8_t> mask) {
  check_emissions(emissions, gold.size());
  if (mask.size() != gold.size()) throw ValidationError("mask length differs from label length");
  XentResult r;
  r.d_emissions = Matrix::Zero(emissions.rows(), kL);
  double total = 0.0;
  for (Index t = 0; t < emissions.rows(); ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    const Vector row = emissions.row(t).transpose();
    const double lse = log_sum_exp(row);
    const auto y = static_cast<Index>(label_index(gold[static_cast<std::size_t>(t)]));
    total += lse - row(y);
    r.d_emissions.row(t) = (row.array() - lse).exp().matrix().transpose();
    r.d_emissions(t, y) -= 1.0;
    ++r.count;
  }
  if (r.count == 0) throw ValidationError("cross-entropy over a fully masked sequence");
  const double n = static_cast<double>(r.count);
  r.loss = total / n;
  r.d_emissions /= n;
  return r;
}

CrfWeights zero_crf_weights() {
  return CrfWeights{Matrix::Zero(kL, kL), Vector::Zero(kL), Vector::Zero(kL)};
}

double crf_path_score(const Matrix& e, const CrfWeights& crf, std::span<const Label> labels) {
  check_crf(crf);
  if (labels.empty()) throw ValidationError("CRF over an empty sequence");
  if (e.cols() != kL || static_cast<std::size_t>(e.rows()) < labels.size()) {
    throw ValidationError("emission matrix too short for the label path");
  }
  auto y = [&](std::size_t t) { return static_cast<Index>(label_index(labels[t])); };
  double s = crf.start(y(0)) + e(0, y(0));
  for (std::size_t t = 1; t < labels.size(); ++t) {
    s += crf.transitions(y(t - 1), y(t)) + e(static_cast<Index>(t), y(t));
  }
  return s + crf.stop(y(labels.size() - 1));
}

double crf_log_partition(const Matrix& e, const CrfWeights& crf, std::span<const std::uint8_t> mask) {
  check_crf(crf);
  check_emissions(e, mask.size());
  const Index len = prefix_length(mask);
  const Matrix alpha = forward_scores(e, crf, len);
  return log_sum_exp(alpha.row(len - 1).transpose() + crf.stop);
}

CrfResult crf_nll(const Matrix& e, const CrfWeights& crf, std::span<const Label> gold,
                  std::span<const std::uint8_t> mask) {
  check_crf(crf);
  check_emissions(e, gold.size());
  if (mask.size() != gold.size()) throw ValidationError("mask length differs from label length");
  const Index len = prefix_length(mask);

  const Matrix alpha = forward_scores(e, crf, len);
  Matrix beta(len, kL);
  beta.row(len - 1) = crf.stop.transpose();
  for (Index t = len - 2; t >= 0; --t) {
    for (Index i = 0; i < kL; ++i) {
      beta(t, i) = log_sum_exp(crf.transitions.row(i).transpose() + e.row(t + 1).transpose() +
                               beta.row(t + 1).transpose());
    }
  }

  CrfResult r;
  r.log_partition = log_sum_exp(alpha.row(len - 1).transpose() + crf.stop);
  r.gold_score = crf_path_score(e, crf, gold.first(static_cast<std::size_t>(len)));
  r.loss = r.log_partition - r.gold_score;

  const double log_z = r.log_partition;
  r.d_emissions = Matrix::Zero(e.rows(), kL);
  r.d_weights = zero_crf_weights();
  for (Index t = 0; t < len; ++t) {
    r.d_emissions.row(t) = (alpha.row(t) + beta.row(t)).array().unaryExpr(
        [log_z](double v) { return std::exp(v - log_z); });
  }
  r.d_weights.start = r.d_emissions.row(0).transpose();
  r.d_weights.stop = r.d_emissions.row(len - 1).transpose();
  for (Index t = 1; t < len; ++t) {
    for (Index i = 0; i < kL; ++i) {
      for (Index j = 0; j < kL; ++j) {
        r.d_weights.transitions(i, j) +=
            std::exp(alpha(t - 1, i) + crf.transitions(i, j) + e(t, j) + beta(t, j) - log_z);
      }
    }
  }
  auto y = [&](Index t) { return static_cast<Index>(label_index(gold[static_cast<std::size_t>(t)])); };
  for (Index t = 0; t < len; ++t) r.d_emissions(t, y(t)) -= 1.0;
  r.d_weights.start(y(0)) -= 1.0;
  r.d_weights.stop(y(len - 1)) -= 1.0;
  for (Index t = 1; t < len; ++t) r.d_weights.transitions(y(t - 1), y(t)) -= 1.0;
  return r;
}

std::vector<Label> crf_viterbi(const Matrix& e, const CrfWeights& crf,
                               std::span<const std::uint8_t> mask) {
  check_crf(crf);
  check_emissions(e, mask.size());
  const Index len = prefix_length(mask);
  Vector score = crf.start + e.row(0).transpose();
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> back(len, kL);
  for (Index t = 1; t < len; ++t) {
    Vector next(kL);
    for (Index j = 0; j < kL; ++j) {
      Index best_i = 0;
      double best = score(0) + crf.transitions(0, j);
      for (Index i = 1; i < kL; ++i) {
        const double s = score(i) + crf.transitions(i, j);
        if (s > best) {
          best = s;
          best_i = i;
        }
      }
      next(j) = best + e(t, j);
      back(t, j) = best_i;
    }
    score = next;
  }
  score += crf.stop;
  Index last = 0;
  for (Index j = 1; j < kL; ++j) {
    if (score(j) > score(last)) last = j;
  }
  std::vector<Label> path(static_cast<std::size_t>(len));
  path.back() = static_cast<Label>(last);
  for (Index t = len - 1; t > 0; --t) {
    last = back(t, last);
    path[static_cast<std::size_t>(t - 1)] = static_cast<Label>(last);
  }
  return path;
}

}  // namespace causalx
