#include <benchmark/benchmark.h>

#include "treecolor/canonical.hpp"
#include "treecolor/spectral.hpp"
#include "treecolor/tensorization.hpp"

using namespace treecolor;

namespace {

void BM_Enumerate(benchmark::State& state) {
  const Tree t = Tree::path(static_cast<int>(state.range(0)));
  const auto lists = ListSpec::uniform(t, 3);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_colorings(t, lists));
  state.counters["states"] = static_cast<double>(enumerate_colorings(t, lists).size());
}
BENCHMARK(BM_Enumerate)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

void BM_CountDP(benchmark::State& state) {
  const Tree t = Tree::complete_regular(3, static_cast<int>(state.range(0)));
  const auto lists = ListSpec::uniform(t, 5);
  for (auto _ : state) benchmark::DoNotOptimize(count_colorings(t, lists));
}
BENCHMARK(BM_CountDP)->DenseRange(2, 6, 2);

void BM_TransitionMatrix(benchmark::State& state) {
  const Tree t = Tree::path(static_cast<int>(state.range(0)));
  const auto lists = ListSpec::uniform(t, 3);
  const auto dist = enumerate_colorings(t, lists);
  for (auto _ : state) benchmark::DoNotOptimize(transition_matrix(t, lists, ChainSpec::heatbath_glauber(), dist));
}
BENCHMARK(BM_TransitionMatrix)->DenseRange(8, 14, 3)->Unit(benchmark::kMillisecond);

// dense route below the cap, forced power iteration for the same chain
void BM_Spectral(benchmark::State& state) {
  const Tree t = Tree::path(static_cast<int>(state.range(0)));
  const auto lists = ListSpec::uniform(t, 3);
  const auto dist = enumerate_colorings(t, lists);
  const auto P = transition_matrix(t, lists, ChainSpec::heatbath_glauber(), dist);
  SpectralOptions opt;
  opt.force_sparse = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_report(P, opt));
}
BENCHMARK(BM_Spectral)->ArgsProduct({{6, 8, 10}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_CanonicalPaths(benchmark::State& state) {
  const Tree t = Tree::hanging_root(2, static_cast<int>(state.range(0)));
  const auto lists = ListSpec::star_root(t, 4);
  const auto dist = enumerate_colorings(t, lists);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_paths(PathFamily::glauber, t, lists, dist));
}
BENCHMARK(BM_CanonicalPaths)->DenseRange(1, 5, 2)->Unit(benchmark::kMillisecond);

void BM_OptimalATConstant(benchmark::State& state) {
  const Tree t = Tree::path(static_cast<int>(state.range(0)));
  const auto dist = enumerate_colorings(t, ListSpec::uniform(t, 3));
  const auto blocks = singleton_blocks(t);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_AT_constant(t, dist, blocks));
}
BENCHMARK(BM_OptimalATConstant)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
