#include "bni/bootstrap.hpp"

#include <algorithm>
#include <ostream>

#include "bni/csv.hpp"
#include "bni/error.hpp"
#include "bni/parallel.hpp"

namespace bni {

std::pair<double, double> percentile_ci(std::span<const double> replicates, double level) {
  if (replicates.empty()) throw ParameterError("percentile_ci: no replicates");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("percentile_ci: level must lie in (0, 1)");
  const double tail = (1.0 - level) / 2.0;
  return {quantile(replicates, tail), quantile(replicates, 1.0 - tail)};
}

std::vector<std::size_t> resample_rows(Rng& rng, std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = rng.index(n);
  return rows;
}

BootstrapRun bootstrap_effects(const AnalysisDataset& dataset, const ReplicateEstimator& estimator,
                               std::vector<EffectEstimate> point, const BootstrapOptions& options,
                               const TruncationBounds* full_data_bounds) {
  if (options.replicates < 2) throw ParameterError("bootstrap needs at least 2 replicates");
  const std::size_t n = dataset.network.num_outcomes();
  if (n == 0) throw ParameterError("bootstrap on an empty dataset");
  const auto B = static_cast<std::size_t>(options.replicates);
  const TruncationBounds* bounds = options.full_data_truncation_bounds ? full_data_bounds : nullptr;

  std::vector<std::vector<EffectEstimate>> results(B);
  std::vector<int> redraws(B, 0);
  parallel_for(B, options.threads, [&](std::size_t b) {
    std::string last_error;
    for (int attempt = 0; attempt <= options.max_redraws; ++attempt) {
      Rng rng(derive_seed(options.seed, {stream::bootstrap, b, static_cast<std::uint64_t>(attempt)}));
      const auto rows = resample_rows(rng, n);
      try {
        auto est = estimator(dataset, rows, bounds);
        if (est.size() != point.size()) {
          throw ParameterError("replicate estimator returned " + std::to_string(est.size()) +
                               " estimates; expected " + std::to_string(point.size()));
        }
        results[b] = std::move(est);
        redraws[b] = attempt;
        return;
      } catch (const NumericalError& e) {
        last_error = e.what();
      }
    }
    throw DegenerateError("bootstrap replicate " + std::to_string(b) + " failed after " +
                          std::to_string(options.max_redraws) + " redraws: " + last_error);
  });

  BootstrapRun run;
  run.replicates = options.replicates;
  run.seed = options.seed;
  run.level = options.level;
  run.redraws = std::move(redraws);
  run.table.reserve(B * point.size());
  for (std::size_t b = 0; b < B; ++b) {
    for (const auto& e : results[b]) {
      run.table.push_back({static_cast<int>(b), e.spec, e.subgroup, e.estimate});
    }
  }
  std::vector<double> values(B);
  for (std::size_t k = 0; k < point.size(); ++k) {
    for (std::size_t b = 0; b < B; ++b) values[b] = results[b][k].estimate;
    point[k].ci = percentile_ci(values, options.level);
  }
  run.estimates = std::move(point);
  return run;
}

BootstrapRun bootstrap_effects(const AnalysisDataset& dataset, const EstimatorConfig& config,
                               const BootstrapOptions& options) {
  const AnalysisResult full = run_analysis(dataset, config);
  const ReplicateEstimator estimator = [&config](const AnalysisDataset& d, std::span<const std::size_t> rows,
                                                 const TruncationBounds* bounds) {
    return run_analysis(d, config, rows, bounds).estimates;
  };
  return bootstrap_effects(dataset, estimator, full.estimates, options, &full.propensity.bundle.bounds);
}

void write_replicates_csv(std::ostream& out, const BootstrapRun& run) {
  CsvWriter w(out);
  w.row({"replicate", "estimand", "held_level", "method", "subgroup", "estimate"});
  for (const auto& r : run.table) {
    w.field(r.replicate).field(to_string(r.spec.kind)).field(r.spec.held).field(to_string(r.spec.method));
    w.field(r.subgroup).field(r.estimate);
    w.end_row();
  }
}

}  // namespace bni
