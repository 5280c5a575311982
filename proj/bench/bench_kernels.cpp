// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bsif/encoder.hpp"
#include "bsif/kernels.hpp"
#include "bsif/matcher.hpp"
#include "bsif/synth.hpp"

using namespace bsif;

namespace {

const SynthDataset& dataset() {
  static const SynthDataset data = [] {
    SynthConfig cfg;
    cfg.classes = 8;
    cfg.samples_per_class = 4;
    cfg.seed = 5;
    return make_synthetic_dataset(cfg);
  }();
  return data;
}

FilterBank gaussian_bank(int n, int l) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(n * 100 + l));
  std::normal_distribution<double> g;
  std::vector<double> c(static_cast<std::size_t>(n) * l * l);
  for (auto& v : c) v = g(rng);
  return FilterBank(n, l, std::move(c));
}

template <void (*Correlate)(const GrayImage&, std::span<const double>, int, std::span<double>)>
void BM_Correlate(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  const auto& image = dataset().images.front().pixels;
  const auto bank = gaussian_bank(1, l);
  std::vector<double> out(static_cast<std::size_t>(kernels::valid_rows(image.height(), l)) * image.width());
  for (auto _ : state) {
    Correlate(image, bank.filter(0), l, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}

template <IrisTemplate (*Encode)(const NormalizedIris&, const FilterBank&)>
void BM_Encode(benchmark::State& state) {
  const auto bank = gaussian_bank(8, static_cast<int>(state.range(0)));
  const auto& iris = dataset().images.front();
  for (auto _ : state) benchmark::DoNotOptimize(Encode(iris, bank));
}

using ScorePairs = std::vector<double> (*)(std::span<const IrisTemplate>, std::span<const BsifHistogram>,
                                           std::span<const IndexPair>, Strategy, const ShiftRange&);

template <ScorePairs Score>
void BM_ScorePairs(benchmark::State& state) {
  static const auto templates = encode_batch(dataset().images, gaussian_bank(8, 9));
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < templates.size(); ++i)
    for (std::size_t j = i + 1; j < templates.size(); ++j) pairs.emplace_back(i, j);
  for (auto _ : state) benchmark::DoNotOptimize(Score(templates, {}, pairs, Strategy::HDMean, {16}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

}  // namespace

BENCHMARK(BM_Correlate<kernels::reference::correlate>)->Name("correlate/reference")->Arg(5)->Arg(17)->Arg(39);
BENCHMARK(BM_Correlate<kernels::parallel::correlate>)->Name("correlate/parallel")->Arg(5)->Arg(17)->Arg(39);
BENCHMARK(BM_Encode<encode_reference>)->Name("encode/reference")->Arg(7)->Arg(17);
BENCHMARK(BM_Encode<encode>)->Name("encode/parallel")->Arg(7)->Arg(17);
BENCHMARK(BM_ScorePairs<score_pairs_reference>)->Name("score_pairs/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScorePairs<score_pairs>)->Name("score_pairs/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
