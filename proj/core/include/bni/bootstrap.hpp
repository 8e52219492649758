#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bni/analysis.hpp"
#include "bni/effects.hpp"
#include "bni/random.hpp"

namespace bni {

// Nearest-rank quantiles at (1-level)/2 and 1-(1-level)/2.
std::pair<double, double> percentile_ci(std::span<const double> replicates, double level = 0.95);

struct BootstrapOptions {
  int replicates = 200;
  std::uint64_t seed = 0;
  double level = 0.95;
  int max_redraws = 10;
  // Reuse the full-data truncation bounds in every replicate instead of
  // recomputing them on the resample.
  bool full_data_truncation_bounds = false;
  unsigned threads = 1;
};

struct ReplicateRow {
  int replicate = 0;
  EffectSpec spec;
  std::string subgroup;
  double estimate = 0.0;
};

struct BootstrapRun {
  int replicates = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
  std::vector<ReplicateRow> table;           // replicate-major, estimate order within
  std::vector<EffectEstimate> estimates;     // full-data point estimates with percentile CIs
  std::vector<int> redraws;                  // per replicate
};

// Computes the configured estimates on one set of resampled outcome rows.
using ReplicateEstimator = std::function<std::vector<EffectEstimate>(
    const AnalysisDataset&, std::span<const std::size_t> rows, const TruncationBounds* bounds)>;

// n outcome rows drawn with replacement.
std::vector<std::size_t> resample_rows(Rng& rng, std::size_t n);

// Per replicate: resample n outcome units with replacement, keep the
// intervention units that are key or upwind for some resampled unit (their
// summary covariates stay at full-data values), refit propensities, rebuild
// truncated joint propensities, refit the outcome model, and recompute every
// configured estimate. A replicate that raises a NumericalError (e.g. one
// treatment class among the retained units) is redrawn up to max_redraws
// times; after that the run aborts with DegenerateError.
BootstrapRun bootstrap_effects(const AnalysisDataset& dataset, const EstimatorConfig& config,
                               const BootstrapOptions& options);

// Same procedure with a caller-supplied estimator; `point` are the full-data
// estimates whose order the estimator must reproduce.
BootstrapRun bootstrap_effects(const AnalysisDataset& dataset, const ReplicateEstimator& estimator,
                               std::vector<EffectEstimate> point, const BootstrapOptions& options,
                               const TruncationBounds* full_data_bounds = nullptr);

// CSV `replicate,estimand,held_level,method,subgroup,estimate`.
void write_replicates_csv(std::ostream& out, const BootstrapRun& run);

}  // namespace bni
