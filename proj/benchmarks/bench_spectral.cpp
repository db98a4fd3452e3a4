#include <benchmark/benchmark.h>

#include "bonefrag/synthetic.hpp"
#include "bonefrag/unsupervised.hpp"

using namespace bonefrag;

namespace {

void BM_KnnGraph(benchmark::State& state) {
  const FeatureTable t = generate_blob_dataset(static_cast<int>(state.range(0)) / 2, 66, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(build_knn_graph(t.rows, 10));
}
BENCHMARK(BM_KnnGraph)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_SpectralClustering(benchmark::State& state) {
  const FeatureTable t = generate_blob_dataset(static_cast<int>(state.range(0)) / 2, 66, 1.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_clustering(t.rows, 2, 7));
}
BENCHMARK(BM_SpectralClustering)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const FeatureTable t = generate_blob_dataset(static_cast<int>(state.range(0)) / 2, 2, 3.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(t.rows, 2, 1));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
