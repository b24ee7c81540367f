#include <benchmark/benchmark.h>

#include "incivil/classifier.hpp"
#include "incivil/nn/conv.hpp"
#include "incivil/nn/lstm.hpp"

using namespace incivil;

static void BM_Conv2dForward(benchmark::State& state) {
  Rng rng(1);
  const auto filters = static_cast<std::size_t>(state.range(0));
  nn::Conv2d conv("conv", 1, filters, 5, 16, rng);
  nn::Tensor x({8, 1, 64, 16});
  nn::uniform_fill(x, -1.0, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(conv.apply(x));
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(64);

static void BM_Conv2dBackward(benchmark::State& state) {
  Rng rng(2);
  nn::Conv2d conv("conv", 1, 16, 5, 16, rng);
  nn::Tensor x({8, 1, 64, 16});
  nn::uniform_fill(x, -1.0, 1.0, rng);
  nn::Tensor y = conv.forward(x);
  nn::Tensor dy(y.shape(), 1.0);
  for (auto _ : state) {
    conv.forward(x);
    benchmark::DoNotOptimize(conv.backward(dy));
  }
}
BENCHMARK(BM_Conv2dBackward);

static void BM_LstmFinalState(benchmark::State& state) {
  Rng rng(3);
  const auto steps = static_cast<std::size_t>(state.range(0));
  nn::LstmCell cell("lstm", 50, 50, rng);
  nn::Tensor xs({steps, 50});
  nn::uniform_fill(xs, -1.0, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nn::lstm_final_state(cell, xs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_LstmFinalState)->Arg(20)->Arg(100);

static void BM_LstmForwardBackward(benchmark::State& state) {
  Rng rng(4);
  nn::LstmCell cell("lstm", 50, 50, rng);
  nn::Tensor xs({40, 50});
  nn::uniform_fill(xs, -1.0, 1.0, rng);
  nn::Tensor dh({50}, 1.0);
  for (auto _ : state) {
    nn::LstmRunner run(cell);
    run.forward(xs);
    benchmark::DoNotOptimize(run.backward(dh));
  }
}
BENCHMARK(BM_LstmForwardBackward);

static void BM_CharCnnPredict(benchmark::State& state) {
  Rng rng(5);
  auto vocab = text::CharVocab::build({"abcdefghijklmnopqrstuvwxyz @!?.,"});
  classifier::CharCnnModel model(vocab, classifier::CharCnnConfig{}, rng);
  std::vector<classifier::CharExample> batch;
  for (int i = 0; i < 64; ++i) batch.push_back({text::char_encode("@bob you are such a clown, honestly", vocab, 64), 0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(batch));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_CharCnnPredict);
BENCHMARK_MAIN();
