#pragma once

#include <cstdint>
#include <span>

#include "causalx/tagger_model.hpp"

namespace causalx {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  TaggerParams first_moment;
  TaggerParams second_moment;
  AdamHyper hyper;
};

AdamState make_adam_state(const TaggerParams& params, AdamHyper hyper = {});

// Bias-corrected Adam on one flat block; `step` is the already-incremented
// step count (1 on the first update).
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first, std::span<double> second, std::uint64_t step,
                 double learning_rate, const AdamHyper& hyper);

// Throws RuntimeFailure naming the block if any gradient is non-finite; in that
// case neither params nor state are modified.
void adam_step(TaggerParams& params, const Gradients& grads, AdamState& state,
               double learning_rate);

}  // namespace causalx
