#include <benchmark/benchmark.h>

#include "bni/analysis.hpp"
#include "bni/bootstrap.hpp"
#include "bni/regression.hpp"
#include "bni/simgen.hpp"

namespace {

bni::SimScenario scenario(std::size_t outcomes) {
  bni::SimScenario s;
  s.seed = 11;
  s.replications = 1;
  s.network.interventions = 40;
  s.network.outcomes = outcomes;
  return s;
}

void BM_FitLogistic(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  bni::Rng rng(1);
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) x(i, c) = rng.normal();
    y(i) = rng.bernoulli(bni::inverse_logit(0.3 + x(i, 0) - x(i, 2))) ? 1 : 0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(bni::fit_logistic(x, y));
}
BENCHMARK(BM_FitLogistic)->Arg(40)->Arg(1000)->Arg(10000);

void BM_Aipw(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  bni::Rng rng(2);
  bni::EstimationInputs d;
  d.y.resize(n);
  d.psi = bni::CellTable::Constant(n, 4, 0.25);
  d.mu_hat.resize(n, 4);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.y(i) = rng.normal();
    d.z.push_back(static_cast<int>(rng.index(2)));
    d.g.push_back(static_cast<int>(rng.index(2)));
    for (int c = 0; c < 4; ++c) d.mu_hat(i, c) = rng.normal();
  }
  const bni::EffectSpec spec{bni::Method::aipw, bni::EffectKind::direct, 0};
  for (auto _ : state) benchmark::DoNotOptimize(bni::effect(d, spec));
}
BENCHMARK(BM_Aipw)->Arg(3000)->Arg(100000);

void BM_BootstrapReplicate(benchmark::State& state) {
  const auto s = scenario(3000);
  auto setup = bni::prepare_scenario(s);
  bni::Rng rng(3);
  setup.dataset.outcomes.outcome =
      bni::generate_outcomes(setup.dataset.outcomes, setup.dataset.assignment, setup.planted, 1.0, rng).y;
  bni::EstimatorConfig cfg;
  cfg.propensity_formula = setup.propensity_formula;
  cfg.outcome_formula = setup.outcome_formula;
  cfg.truncation = s.truncation;
  cfg.effects = {{bni::Method::aipw, bni::EffectKind::direct, 0}};
  bni::Rng draw(4);
  for (auto _ : state) {
    const auto rows = bni::resample_rows(draw, setup.dataset.network.num_outcomes());
    benchmark::DoNotOptimize(bni::run_analysis(setup.dataset, cfg, rows));
  }
}
BENCHMARK(BM_BootstrapReplicate)->Unit(benchmark::kMillisecond);

void BM_ScenarioReplicate(benchmark::State& state) {
  const auto s = scenario(3000);
  for (auto _ : state) benchmark::DoNotOptimize(bni::run_scenario(s));
}
BENCHMARK(BM_ScenarioReplicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
