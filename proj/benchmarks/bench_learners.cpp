#include <benchmark/benchmark.h>

#include "bonefrag/classifier.hpp"
#include "bonefrag/synthetic.hpp"

using namespace bonefrag;

namespace {

void BM_Fit(benchmark::State& state) {
  const auto algorithm = static_cast<Algorithm>(state.range(0));
  const FeatureTable t = generate_blob_dataset(static_cast<int>(state.range(1)), 10, 2.0, 1);
  ClassifierSpec spec = ClassifierSpec::defaults(algorithm, 3);
  if (algorithm == Algorithm::neural_net) spec.params = NeuralNetParams::compact();
  state.SetLabel(std::string(to_string(algorithm)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, t));
}

void learner_args(benchmark::internal::Benchmark* b) {
  for (Algorithm a : kAllAlgorithms) b->Args({static_cast<long>(a), 200});
  b->Args({static_cast<long>(Algorithm::rbf_svm), 1000});
  b->Args({static_cast<long>(Algorithm::random_forest), 1000});
}
BENCHMARK(BM_Fit)->Apply(learner_args)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const FeatureTable t = generate_blob_dataset(500, 10, 2.0, 1);
  const FittedModel m = fit(ClassifierSpec::defaults(static_cast<Algorithm>(state.range(0)), 3), t);
  state.SetLabel(std::string(to_string(m.spec().algorithm())));
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(t.rows));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(t.size()));
}
BENCHMARK(BM_Predict)
    ->Arg(static_cast<long>(Algorithm::random_forest))
    ->Arg(static_cast<long>(Algorithm::rbf_svm))
    ->Arg(static_cast<long>(Algorithm::knn))
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
