#include "causalx/adam.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "causalx/error.hpp"

namespace causalx {

AdamState make_adam_state(const TaggerParams& params, AdamHyper hyper) {
  return AdamState{0, zeros_like(params), zeros_like(params), hyper};
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> first,
                 std::span<double> second, std::uint64_t step, double learning_rate,
                 const AdamHyper& hyper) {
  const double t = static_cast<double>(step);
  const double correction1 = 1.0 - std::pow(hyper.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    first[i] = hyper.beta1 * first[i] + (1.0 - hyper.beta1) * g;
    second[i] = hyper.beta2 * second[i] + (1.0 - hyper.beta2) * g * g;
    const double m_hat = first[i] / correction1;
    const double v_hat = second[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

void adam_step(TaggerParams& params, const Gradients& grads, AdamState& state,
               double learning_rate) {
  if (!same_shape(params, grads) || !same_shape(params, state.first_moment)) {
    throw ValidationError("adam_step: gradient or state shape differs from params");
  }
  std::vector<std::span<const double>> g;
  for_each_block(grads, [&](std::string_view name, std::span<const double> v, auto, auto) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) {
        throw RuntimeFailure("non-finite gradient in block " + std::string(name) + " at index " +
                             std::to_string(i));
      }
    }
    g.push_back(v);
  });
  std::vector<std::span<double>> m, s;
  for_each_block(state.first_moment, [&](std::string_view, std::span<double> v, auto, auto) { m.push_back(v); });
  for_each_block(state.second_moment, [&](std::string_view, std::span<double> v, auto, auto) { s.push_back(v); });

  ++state.step;
  std::size_t b = 0;
  for_each_block(params, [&](std::string_view, std::span<double> v, auto, auto) {
    adam_update(v, g[b], m[b], s[b], state.step, learning_rate, state.hyper);
    ++b;
  });
}

}  // namespace causalx
