// Microbenchmarks for the hot paths: single-model criterion evaluation,
// selection over a nested space, and a small end-to-end experiment.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "cvsel/criterion.hpp"
#include "cvsel/model_space.hpp"
#include "cvsel/rng.hpp"
#include "cvsel/schemes.hpp"
#include "cvsel/simulate.hpp"
#include "cvsel/types.hpp"

namespace {

using namespace cvsel;

struct Instance {
  Matrix x;
  Vector y;
  TrainingScheme scheme;
  ModelSpace space;
};

Instance make_instance(int n, int t, int p) {
  Instance inst;
  inst.x = gen_design("equispaced-polynomial", p, n, 7);
  Rng rng(42);
  inst.y = Vector(n);
  for (int i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i + 1) / n;
    inst.y[i] = std::exp(ti) + rng.normal();
  }
  inst.scheme = disjoint_scheme(n, t, BlockLayout::strided);
  SpaceSpec spec;
  spec.kind = SpaceSpec::Kind::nested;
  spec.ambient_p = p;
  inst.space = enumerate_models(spec);
  return inst;
}

void BM_CriterionUnknownSigma(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, n / 20, 5);
  const ModelAlpha alpha{{1, 2, 3}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_unknown(inst.x, inst.y, alpha, inst.scheme).value);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_CriterionUnknownSigma)->Arg(200)->Arg(800)->Arg(3200)->Complexity();

void BM_SelectNestedSpace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = make_instance(n, n / 20, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_model(inst.space, inst.x, inst.y, inst.scheme, Variant::unknown_sigma));
  }
}
BENCHMARK(BM_SelectNestedSpace)->Arg(400)->Arg(1600);

void BM_SmallExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.n_grid = {100};
  cfg.replications = 20;
  cfg.design.id = "equispaced-polynomial";
  cfg.design.p = 4;
  cfg.truth.id = "linear-in-subset";
  cfg.truth.alpha_star = ModelAlpha{{1, 2}};
  cfg.truth.beta_star = {1.0, 1.0};
  cfg.errors.dist = "normal";
  cfg.errors.sigma = 1.0;
  cfg.scheme.kind = "disjoint";
  cfg.scheme.layout = BlockLayout::strided;
  cfg.train_rule.kind = "fraction";
  cfg.train_rule.fraction = 0.2;
  cfg.space.kind = SpaceSpec::Kind::nested;
  cfg.variant = Variant::known_sigma;
  cfg.seed = 5;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg, threads));
  }
}
BENCHMARK(BM_SmallExperiment)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
