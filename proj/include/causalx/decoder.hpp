#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "causalx/corpus.hpp"
#include "causalx/tagger_model.hpp"

namespace causalx {

// 1 = real token, 0 = padding.
using Mask = std::vector<std::uint8_t>;

struct XentResult {
  double loss = 0.0;    // mean over unmasked positions
  Matrix d_emissions;   // (softmax - onehot) / n_unmasked, zero rows where masked
  std::size_t count = 0;
};

// Masked softmax cross-entropy. Throws ValidationError when every position is
// masked or shapes disagree.
XentResult xent_loss(const Matrix& emissions, std::span<const Label> gold,
                     std::span<const std::uint8_t> mask);

struct CrfResult {
  double loss = 0.0;  // log_partition - gold_score
  double log_partition = 0.0;
  double gold_score = 0.0;
  Matrix d_emissions;  // T x 3, zero on padding
  CrfWeights d_weights;
};

CrfWeights zero_crf_weights();

// Score of one complete label path over the first labels.size() rows.
double crf_path_score(const Matrix& emissions, const CrfWeights& crf,
                      std::span<const Label> labels);

// Log-space forward recursion; the mask must be a nonempty contiguous prefix.
double crf_log_partition(const Matrix& emissions, const CrfWeights& crf,
                         std::span<const std::uint8_t> mask);

// Negative log-likelihood of `gold` with gradients from forward-backward
// marginals.
CrfResult crf_nll(const Matrix& emissions, const CrfWeights& crf, std::span<const Label> gold,
                  std::span<const std::uint8_t> mask);

// Highest-scoring path over the unmasked prefix. At every backpointer and at
// the final state the lowest label index wins ties.
std::vector<Label> crf_viterbi(const Matrix& emissions, const CrfWeights& crf,
                               std::span<const std::uint8_t> mask);

Mask prefix_mask(std::size_t length, std::size_t padded_length);

}  // namespace causalx
