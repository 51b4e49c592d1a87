#include "causalx/kernels.hpp"

#include <algorithm>

#include "causalx/error.hpp"
#include "parallel.hpp"

namespace causalx {

namespace {

using Eigen::Index;

}  // namespace

SentencePass sentence_pass(const TaggerParams& params, const Matrix& inputs,
                           std::span<const Label> gold) {
  const auto len = static_cast<Index>(gold.size());
  const Index h = params.hidden();
  SentencePass pass;
  pass.length = len;
  pass.forward = rnn_forward(params.forward, inputs, len, false);
  pass.backward = rnn_forward(params.backward, inputs, len, true);
  pass.context.resize(len, 2 * h);
  pass.context << pass.forward.states, pass.backward.states;
  const Matrix scores = emissions(params, pass.context);

  const Mask ones(gold.size(), 1);
  if (params.crf) {
    CrfResult r = crf_nll(scores, *params.crf, gold, ones);
    pass.loss = r.loss;
    pass.d_emissions = std::move(r.d_emissions);
    pass.d_crf = std::move(r.d_weights);
  } else {
    XentResult r = xent_loss(scores, gold, ones);
    const double n = static_cast<double>(r.count);
    pass.loss = r.loss * n;
    pass.d_emissions = r.d_emissions * n;
  }
  const Matrix d_context = pass.d_emissions * params.out_weight;
  pass.d_forward_preact = rnn_backward(params.forward, pass.forward, d_context.leftCols(h));
  pass.d_backward_preact = rnn_backward(params.backward, pass.backward, d_context.rightCols(h));
  return pass;
}

void accumulate_pass(const TaggerParams& params, const Matrix& inputs, const SentencePass& pass,
                     Gradients& grad) {
  grad.out_weight.noalias() += pass.d_emissions.transpose() * pass.context;
  grad.out_bias += pass.d_emissions.colwise().sum().transpose();
  if (params.crf) {
    grad.crf->transitions += pass.d_crf.transitions;
    grad.crf->start += pass.d_crf.start;
    grad.crf->stop += pass.d_crf.stop;
  }
  accumulate_rnn_gradients(params.forward, pass.forward, inputs, pass.d_forward_preact, grad.forward);
  accumulate_rnn_gradients(params.backward, pass.backward, inputs, pass.d_backward_preact,
                           grad.backward);
}

double sentence_loss_and_gradient(const TaggerParams& params, const Matrix& inputs,
                                  std::span<const Label> gold, Gradients& grad) {
  const SentencePass pass = sentence_pass(params, inputs, gold);
  accumulate_pass(params, inputs, pass, grad);
  return pass.loss;
}

double sentence_loss(const TaggerParams& params, const Matrix& inputs, std::span<const Label> gold) {
  const auto len = static_cast<Index>(gold.size());
  const Matrix context = bidir_encode(params, inputs, len).topRows(len);
  const Matrix scores = emissions(params, context);
  const Mask ones(gold.size(), 1);
  if (params.crf) return crf_nll(scores, *params.crf, gold, ones).loss;
  const XentResult r = xent_loss(scores, gold, ones);
  return r.loss * static_cast<double>(r.count);
}

std::vector<Label> decode(const TaggerParams& params, const Matrix& inputs, Index length) {
  const Matrix context = bidir_encode(params, inputs, length).topRows(length);
  const Matrix scores = emissions(params, context);
  if (params.crf) return crf_viterbi(scores, *params.crf, Mask(static_cast<std::size_t>(length), 1));
  return argmax_labels(scores);
}

BatchGradient batch_gradient_serial(const TaggerParams& params, const BatchInput& batch) {
  BatchGradient out{0.0, 0, zeros_like(params)};
  for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
    const SentencePass pass = sentence_pass(params, *batch.inputs[i], batch.labels[i]);
    accumulate_pass(params, *batch.inputs[i], pass, out.grad);
    out.loss_sum += pass.loss;
    out.tokens += batch.labels[i].size();
  }
  return out;
}

BatchGradient batch_gradient_parallel(const TaggerParams& params, const BatchInput& batch) {
  const std::size_t n = batch.inputs.size();
  std::vector<SentencePass> passes(n);
  detail::parallel_for(n, [&](std::size_t i) {
    passes[i] = sentence_pass(params, *batch.inputs[i], batch.labels[i]);
  });
  // Ordered reduction: identical to the serial accumulation sequence.
  BatchGradient out{0.0, 0, zeros_like(params)};
  for (std::size_t i = 0; i < n; ++i) {
    accumulate_pass(params, *batch.inputs[i], passes[i], out.grad);
    out.loss_sum += passes[i].loss;
    out.tokens += batch.labels[i].size();
  }
  return out;
}

BatchGradient batch_gradient(const TaggerParams& params, const BatchInput& batch,
                             Execution execution) {
  return execution == Execution::Serial ? batch_gradient_serial(params, batch)
                                        : batch_gradient_parallel(params, batch);
}

Matrix to_matrix(const EmbeddingMatrix& embedding, Index padded_rows) {
  const auto rows = static_cast<Index>(embedding.rows);
  const auto dim = static_cast<Index>(embedding.dim);
  Matrix m = Matrix::Zero(std::max(rows, padded_rows), dim);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < dim; ++c) {
      m(r, c) = static_cast<double>(embedding.values[static_cast<std::size_t>(r * dim + c)]);
    }
  }
  return m;
}

namespace {

std::vector<Label> decode_embedding(const TaggerParams& params, const EmbeddingMatrix& e) {
  if (static_cast<Index>(e.dim) != params.input_dim()) {
    throw ValidationError("embedding dim " + std::to_string(e.dim) + " differs from model input dim " +
                          std::to_string(params.input_dim()));
  }
  return decode(params, to_matrix(e), static_cast<Index>(e.rows));
}

}  // namespace

std::vector<std::vector<Label>> decode_all_serial(const TaggerParams& params,
                                                  std::span<const EmbeddingMatrix* const> items) {
  std::vector<std::vector<Label>> out;
  out.reserve(items.size());
  for (const EmbeddingMatrix* e : items) out.push_back(decode_embedding(params, *e));
  return out;
}

std::vector<std::vector<Label>> decode_all_parallel(const TaggerParams& params,
                                                    std::span<const EmbeddingMatrix* const> items) {
  std::vector<std::vector<Label>> out(items.size());
  detail::parallel_for(items.size(), [&](std::size_t i) { out[i] = decode_embedding(params, *items[i]); });
  return out;
}

std::vector<std::vector<Label>> decode_all(const TaggerParams& params,
                                           std::span<const EmbeddingMatrix* const> items,
                                           Execution execution) {
  return execution == Execution::Serial ? decode_all_serial(params, items)
                                        : decode_all_parallel(params, items);
}

}  // namespace causalx
