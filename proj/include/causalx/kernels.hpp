#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "causalx/corpus.hpp"
#include "causalx/decoder.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/rnn.hpp"
#include "causalx/tagger_model.hpp"

namespace causalx {

// How batch-level kernels distribute sentences. Both produce bit-identical
// results: per-sentence passes are independent and reductions always run in
// sentence order.
enum class Execution { Serial, Parallel };

// Forward + backward for one sentence, with the gradients of the small blocks
// already formed and the recurrent weight gradients left as pre-activation
// gradients, so the reduction can fold them in with two products per block.
struct SentencePass {
  double loss = 0.0;  // summed token cross-entropy, or the sentence CRF NLL
  Eigen::Index length = 0;
  RnnTrace forward;
  RnnTrace backward;
  Matrix context;
  Matrix d_emissions;
  Matrix d_forward_preact;
  Matrix d_backward_preact;
  CrfWeights d_crf;
};

// `inputs` may carry padding rows past `gold.size()`.
SentencePass sentence_pass(const TaggerParams& params, const Matrix& inputs,
                           std::span<const Label> gold);

// grad += this sentence's contribution.
void accumulate_pass(const TaggerParams& params, const Matrix& inputs, const SentencePass& pass,
                     Gradients& grad);

// Summed loss and gradient of one sentence (no normalization).
double sentence_loss_and_gradient(const TaggerParams& params, const Matrix& inputs,
                                  std::span<const Label> gold, Gradients& grad);
double sentence_loss(const TaggerParams& params, const Matrix& inputs,
                     std::span<const Label> gold);

// Decoded labels for the first `length` rows.
std::vector<Label> decode(const TaggerParams& params, const Matrix& inputs, Eigen::Index length);

struct BatchInput {
  std::vector<const Matrix*> inputs;
  std::vector<std::span<const Label>> labels;
};

struct BatchGradient {
  double loss_sum = 0.0;
  std::size_t tokens = 0;
  Gradients grad;
};

// Serial reference: one sentence after another.
BatchGradient batch_gradient_serial(const TaggerParams& params, const BatchInput& batch);
// OpenMP over sentences, then an ordered reduction.
BatchGradient batch_gradient_parallel(const TaggerParams& params, const BatchInput& batch);
BatchGradient batch_gradient(const TaggerParams& params, const BatchInput& batch,
                             Execution execution);

// Widens a stored embedding to training precision, zero-padding to
// `padded_rows` when it is larger than the sentence.
Matrix to_matrix(const EmbeddingMatrix& embedding, Eigen::Index padded_rows = 0);

// Decodes whole sentences straight from stored embeddings.
std::vector<std::vector<Label>> decode_all_serial(const TaggerParams& params,
                                                  std::span<const EmbeddingMatrix* const> items);
std::vector<std::vector<Label>> decode_all_parallel(
    const TaggerParams& params, std::span<const EmbeddingMatrix* const> items);
std::vector<std::vector<Label>> decode_all(const TaggerParams& params,
                                           std::span<const EmbeddingMatrix* const> items,
                                           Execution execution);

}  // namespace causalx
