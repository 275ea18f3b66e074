#include <benchmark/benchmark.h>

#include "specboot/specboot.hpp"

namespace {

using namespace specboot;

Dataset make_data(Eigen::Index n, Eigen::Index p) {
  Rng rng = derive_stream(StreamKey(7).child("bench", static_cast<std::uint64_t>(p)));
  const PopulationModel model =
      build_population(PolynomialDecay{1.0}, p, parse_generator("elliptical"), rng);
  return sample_dataset(model, n, rng);
}

// One replicate per iteration: resample, gather and top-k eigenvalues.
void BM_Replicate(benchmark::State& state, ReplicateRoute route) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index p = state.range(1);
  const Eigen::Index k = state.range(2);
  const Dataset ds = make_data(n, p);
  ReplicateEngine engine(ds.x, k, false, route);
  Rng rng = derive_stream(StreamKey(11));
  std::vector<std::size_t> idx;
  std::vector<double> top(static_cast<std::size_t>(k));
  double trace = 0.0;
  for (auto _ : state) {
    resample_indices_into(static_cast<std::size_t>(n), rng, idx);
    engine.compute(idx, top.data(), trace);
    benchmark::DoNotOptimize(top.data());
  }
  state.SetLabel(to_string(engine.last_route()));
}

void Args(benchmark::internal::Benchmark* b) {
  for (int p : {10, 50, 100, 200}) b->Args({500, p, 5});
  b->Args({100, 200, 5});
  b->Unit(benchmark::kMicrosecond);
}

void BM_Full(benchmark::State& state) {
  const Dataset ds = make_data(state.range(0), state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ReplicateDraws d = draw_replicates(ds, state.range(2), 200, StreamKey(seed++));
    benchmark::DoNotOptimize(d.reps.data());
  }
  state.SetItemsProcessed(state.iterations() * 200);
}

}  // namespace

BENCHMARK_CAPTURE(BM_Replicate, auto, specboot::ReplicateRoute::Auto)->Apply(Args);
BENCHMARK_CAPTURE(BM_Replicate, covariance, specboot::ReplicateRoute::Covariance)->Apply(Args);
BENCHMARK_CAPTURE(BM_Replicate, gram, specboot::ReplicateRoute::Gram)->Apply(Args);
BENCHMARK_CAPTURE(BM_Replicate, krylov, specboot::ReplicateRoute::Krylov)->Apply(Args);
BENCHMARK(BM_Full)->Args({500, 200, 5})->Args({500, 50, 5})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
