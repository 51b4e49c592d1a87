// Serial reference vs OpenMP kernels on a fixed synthetic batch.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "causalx/corpus.hpp"
#include "causalx/embed_store.hpp"
#include "causalx/kernels.hpp"
#include "causalx/rng.hpp"
#include "causalx/tagger_model.hpp"

using namespace causalx;

namespace {

struct Fixture {
  TaggerParams params;
  std::vector<Matrix> inputs;
  std::vector<std::vector<Label>> labels;
  std::vector<EmbeddingMatrix> stored;
  BatchInput batch;
  std::vector<const EmbeddingMatrix*> items;

  Fixture(std::size_t sentences, std::size_t dim, std::size_t hidden, DecoderKind decoder) {
    TaggerConfig c;
    c.input_dim = dim;
    c.hidden_size = hidden;
    c.decoder_kind = decoder;
    params = init_params(c, 11);
    Rng rng(5);
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t t = 10 + rng.uniform_index(30);
      EmbeddingMatrix e;
      e.sentence_id = "s" + std::to_string(s);
      e.rows = t;
      e.dim = dim;
      for (std::size_t k = 0; k < t * dim; ++k) {
        e.values.push_back(static_cast<float>(rng.uniform(-1, 1)));
      }
      std::vector<Label> l(t);
      for (auto& x : l) x = kAllLabels[rng.uniform_index(3)];
      inputs.push_back(to_matrix(e));
      labels.push_back(std::move(l));
      stored.push_back(std::move(e));
    }
    for (std::size_t s = 0; s < sentences; ++s) {
      batch.inputs.push_back(&inputs[s]);
      batch.labels.emplace_back(labels[s]);
      items.push_back(&stored[s]);
    }
  }
};

const Fixture& fixture(DecoderKind decoder) {
  static const Fixture linear(64, 64, 64, DecoderKind::Linear);
  static const Fixture crf(64, 64, 64, DecoderKind::Crf);
  return decoder == DecoderKind::Crf ? crf : linear;
}

void BM_BatchGradient(benchmark::State& state, Execution execution, DecoderKind decoder) {
  const Fixture& f = fixture(decoder);
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_gradient(f.params, f.batch, execution).loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.inputs.size()));
}

void BM_DecodeAll(benchmark::State& state, Execution execution, DecoderKind decoder) {
  const Fixture& f = fixture(decoder);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_all(f.params, f.items, execution).size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.items.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_BatchGradient, serial_linear, Execution::Serial, DecoderKind::Linear);
BENCHMARK_CAPTURE(BM_BatchGradient, parallel_linear, Execution::Parallel, DecoderKind::Linear);
BENCHMARK_CAPTURE(BM_BatchGradient, serial_crf, Execution::Serial, DecoderKind::Crf);
BENCHMARK_CAPTURE(BM_BatchGradient, parallel_crf, Execution::Parallel, DecoderKind::Crf);
BENCHMARK_CAPTURE(BM_DecodeAll, serial_linear, Execution::Serial, DecoderKind::Linear);
BENCHMARK_CAPTURE(BM_DecodeAll, parallel_linear, Execution::Parallel, DecoderKind::Linear);
BENCHMARK_CAPTURE(BM_DecodeAll, serial_crf, Execution::Serial, DecoderKind::Crf);
BENCHMARK_CAPTURE(BM_DecodeAll, parallel_crf, Execution::Parallel, DecoderKind::Crf);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
