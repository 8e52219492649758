#include <doctest.h>

#include <numeric>
#include <sstream>

#include "bni/bootstrap.hpp"
#include "bni/error.hpp"
#include "fixtures.hpp"

namespace {

bni::AnalysisDataset world(std::uint64_t seed) {
  for (;;) {
    bni::Rng rng(seed++);
    auto d = fixture::assemble(fixture::random_world(rng, 8, 60));
    const auto c = bni::cell_counts(d.assignment);
    if (c[0][0] > 3 && c[0][1] > 3 && c[1][0] > 3 && c[1][1] > 3) return d;
  }
}

bni::EstimatorConfig config() {
  bni::EstimatorConfig cfg;
  cfg.propensity_formula = bni::Formula();
  cfg.outcome_formula = bni::Formula::parse("x + Z + G");
  cfg.effects = {{bni::Method::aipw, bni::EffectKind::direct, 0}, {bni::Method::gcomp, bni::EffectKind::spillover, 1}};
  return cfg;
}

std::string replicates_csv(const bni::BootstrapRun& run) {
  std::ostringstream out;
  bni::write_replicates_csv(out, run);
  return out.str();
}

}  // namespace

TEST_SUITE("bootstrap") {

TEST_CASE("percentile intervals") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  auto ci = bni::percentile_ci(v, 0.95);
  CHECK(ci.first == 3);
  CHECK(ci.second == 98);
  const std::vector<double> four{4, 2, 1, 3};
  ci = bni::percentile_ci(four);
  CHECK(ci.first == 1);
  CHECK(ci.second == 4);
  const std::vector<double> one{5};
  CHECK(bni::percentile_ci(one) == std::pair<double, double>{5, 5});
  CHECK_THROWS_AS(bni::percentile_ci(std::vector<double>{}), bni::ParameterError);
  CHECK_THROWS_AS(bni::percentile_ci(one, 1.0), bni::ParameterError);
}

TEST_CASE("resampling draws indices in range with replacement") {
  bni::Rng rng(501);
  const auto rows = bni::resample_rows(rng, 50);
  CHECK(rows.size() == 50);
  CHECK(*std::max_element(rows.begin(), rows.end()) < 50);
  std::vector<std::size_t> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end());
}

TEST_CASE("a constant estimator yields a degenerate interval") {
  const auto d = world(502);
  bni::EffectEstimate point;
  point.estimate = 7;
  const bni::ReplicateEstimator constant = [&](const bni::AnalysisDataset&, std::span<const std::size_t>,
                                                const bni::TruncationBounds*) {
    return std::vector<bni::EffectEstimate>{point};
  };
  bni::BootstrapOptions opt;
  opt.replicates = 20;
  const auto run = bni::bootstrap_effects(d, constant, {point}, opt);
  REQUIRE(run.estimates.size() == 1);
  CHECK(run.estimates[0].ci == std::pair<double, double>{7, 7});
  CHECK(run.table.size() == 20);
}

TEST_CASE("replicates are deterministic in the seed and independent of threads") {
  const auto d = world(503);
  bni::BootstrapOptions opt;
  opt.replicates = 30;
  opt.seed = 9;
  const auto a = bni::bootstrap_effects(d, config(), opt);
  opt.threads = 3;
  const auto b = bni::bootstrap_effects(d, config(), opt);
  CHECK(replicates_csv(a) == replicates_csv(b));
  opt.seed = 10;
  const auto c = bni::bootstrap_effects(d, config(), opt);
  CHECK(replicates_csv(a) != replicates_csv(c));
  REQUIRE(a.estimates.size() == 2);
  for (const auto& e : a.estimates) {
    REQUIRE(e.ci.has_value());
    CHECK(e.ci->first <= e.ci->second);
  }
}

TEST_CASE("replicates see the full-data summaries and refit on retained units") {
  const auto d = world(504);
  bni::BootstrapOptions opt;
  opt.replicates = 10;
  opt.seed = 3;
  const auto cfg = config();
  const bni::ReplicateEstimator probe = [&](const bni::AnalysisDataset& rd, std::span<const std::size_t> rows,
                                             const bni::TruncationBounds* bounds) {
    // summaries are frozen: the replicate receives the full-data design
    CHECK(&rd == &d);
    CHECK(bounds == nullptr);
    const auto stage = bni::fit_propensity_stage(rd, cfg.propensity_formula, cfg.truncation, rows);
    CHECK(stage.retained == bni::retained_interventions(rd.network, rows));
    double frac = 0;
    for (auto j : stage.retained) frac += (*rd.interventions.treatment)[j];
    frac /= static_cast<double>(stage.retained.size());
    CHECK(stage.fit.phi(0) == doctest::Approx(frac));
    return bni::run_analysis(rd, cfg, rows, bounds).estimates;
  };
  const auto point = bni::run_analysis(d, cfg).estimates;
  bni::bootstrap_effects(d, probe, point, opt);
}

TEST_CASE("full-data truncation bounds are handed to replicates on request") {
  const auto d = world(505);
  bni::BootstrapOptions opt;
  opt.replicates = 5;
  opt.full_data_truncation_bounds = true;
  bni::TruncationBounds fixed;
  int seen = 0;
  const bni::ReplicateEstimator probe = [&](const bni::AnalysisDataset&, std::span<const std::size_t>,
                                             const bni::TruncationBounds* bounds) {
    CHECK(bounds == &fixed);
    ++seen;
    return std::vector<bni::EffectEstimate>(1);
  };
  bni::bootstrap_effects(d, probe, std::vector<bni::EffectEstimate>(1), opt, &fixed);
  CHECK(seen == 5);
}

TEST_CASE("failing replicates are redrawn, then abort") {
  const auto d = world(506);
  bni::BootstrapOptions opt;
  opt.replicates = 4;
  opt.max_redraws = 3;
  int calls = 0;
  const bni::ReplicateEstimator flaky = [&](const bni::AnalysisDataset&, std::span<const std::size_t>,
                                             const bni::TruncationBounds*) {
    if (++calls % 2 == 1) throw bni::SeparationError("odd call");
    return std::vector<bni::EffectEstimate>(1);
  };
  const auto run = bni::bootstrap_effects(d, flaky, std::vector<bni::EffectEstimate>(1), opt);
  CHECK(run.redraws == std::vector<int>{1, 1, 1, 1});
  const bni::ReplicateEstimator broken = [](const bni::AnalysisDataset&, std::span<const std::size_t>,
                                             const bni::TruncationBounds*) -> std::vector<bni::EffectEstimate> {
    throw bni::SeparationError("always");
  };
  CHECK_THROWS_AS(bni::bootstrap_effects(d, broken, std::vector<bni::EffectEstimate>(1), opt), bni::DegenerateError);
  CHECK_THROWS_AS(bni::bootstrap_effects(d, broken, {}, bni::BootstrapOptions{1}), bni::ParameterError);
}

}
