#pragma once

#include <cstddef>

#include "causalx/tagger_model.hpp"

namespace causalx {

// h_t = (1 - z) * h_prev + z * n, with
//   z = sigmoid(Wz x + Uz h_prev + bz), r = sigmoid(Wr x + Ur h_prev + br),
//   n = tanh(Wn x + Un (r * h_prev) + bn).
Vector gru_step(const RnnWeights& weights, const Vector& x, const Vector& h_prev);

struct LstmState {
  Vector h;
  Vector c;
};

// c_t = f * c_prev + i * g, h_t = o * tanh(c_t).
LstmState lstm_step(const RnnWeights& weights, const Vector& x, const LstmState& prev);

// Everything the backward pass needs from one direction over one sentence.
// Rows are indexed by token position, whichever direction was read.
struct RnnTrace {
  bool reverse = false;
  Eigen::Index length = 0;
  Matrix states;     // length x h, row t = state after consuming token t
  Matrix prev;       // length x h, state fed into the step at token t
  Matrix gates;      // length x (gates*h), post-activation gate values
  Matrix cells;      // LSTM only: length x h cell state after token t
  Matrix prev_cells; // LSTM only
};

// Runs one direction over rows [0, length) of `inputs`. Rows past `length`
// are never read. Initial state is zero.
RnnTrace rnn_forward(const RnnWeights& weights, const Matrix& inputs, Eigen::Index length,
                     bool reverse);

// Backpropagates d(loss)/d(states) through time, returning d(loss)/d(gate
// pre-activations), length x (gates*h), row t for the step at token t.
Matrix rnn_backward(const RnnWeights& weights, const RnnTrace& trace, const Matrix& d_states);

// Folds pre-activation gradients into weight gradients:
//   d_input += D^T X, d_recurrent += D^T H_prev (GRU candidate rows use r*h_prev),
//   d_bias += column sums of D.
void accumulate_rnn_gradients(const RnnWeights& weights, const RnnTrace& trace,
                              const Matrix& inputs, const Matrix& d_preact, RnnWeights& grad);

// Row t = [forward state at t, backward state at t] for t < length; rows in
// [length, inputs.rows()) are zero and padding never affects earlier rows.
Matrix bidir_encode(const TaggerParams& params, const Matrix& inputs, Eigen::Index length);
Matrix bidir_encode(const TaggerParams& params, const Matrix& inputs);

}  // namespace causalx
