#include <benchmark/benchmark.h>

#include "clusterface/constraints.hpp"
#include "clusterface/synthetic.hpp"

namespace {

using namespace clusterface;

FaceSetIndex make_space(int sets, int dim) {
  SyntheticSpec spec;
  spec.identities = (sets + 3) / 4;
  spec.sets_per_identity = 4;
  spec.dimension = dim;
  spec.within_noise = 0.05;
  spec.seed = 9001;
  SyntheticData data = generate_synthetic(spec);
  data.sets.erase(data.sets.begin() + sets, data.sets.end());
  return FaceSetIndex(std::move(data.sets));
}

void BM_CosineDistance(benchmark::State& state) {
  const FaceSetIndex space = make_space(2, static_cast<int>(state.range(0)));
  const Embedding& a = space.sets()[0].representative();
  const Embedding& b = space.sets()[1].representative();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosine_distance(a, b));
  }
}
BENCHMARK(BM_CosineDistance)->Arg(16)->Arg(64)->Arg(256);

void BM_SalientClustering(benchmark::State& state) {
  const FaceSetIndex space = make_space(static_cast<int>(state.range(0)), 16);
  PipelineConfig config;
  config.beta = 0.4;
  config.gamma = 0.1;
  std::size_t evaluations = 0;
  for (auto _ : state) {
    const ClusteringResult result = run_salient_clustering(space, config);
    evaluations = result.distance_evaluations();
    benchmark::DoNotOptimize(result.clusters().size());
  }
  state.counters["distance_evals"] = static_cast<double>(evaluations);
}
BENCHMARK(BM_SalientClustering)->Arg(128)->Arg(256)->Arg(512)->Arg(1024)
    ->Unit(benchmark::kMillisecond);

void BM_Knn(benchmark::State& state) {
  const FaceSetIndex space = make_space(static_cast<int>(state.range(0)), 16);
  const std::string query = space.sets()[0].set_id();
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn(query, space, 5, 0.8).size());
  }
}
BENCHMARK(BM_Knn)->Arg(128)->Arg(512);

void BM_BuildConstraints(benchmark::State& state) {
  const FaceSetIndex space = make_space(static_cast<int>(state.range(0)), 16);
  PipelineConfig config;
  config.beta = 0.4;
  config.gamma = 0.1;
  const ClusteringResult result = run_salient_clustering(space, config);
  for (auto _ : state) {
    const ConstraintMatrices matrices =
        build_constraints(result, space, space.labels(), config.k, config.beta);
    benchmark::DoNotOptimize(matrices.ma_entries().size());
  }
}
BENCHMARK(BM_BuildConstraints)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
