#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bni/formula.hpp"
#include "bni/regression.hpp"

namespace bni {

struct BinarizedCovariates {
  std::vector<std::string> names;
  Eigen::MatrixXd values;   // 1 iff covariate > cut
  std::vector<double> cuts;  // nearest-rank medians
};

// Throws DegenerateError for a column with fewer than two distinct values.
BinarizedCovariates binarize_at_median(const NamedColumns& covariates,
                                       const std::vector<std::string>& columns);

Eigen::VectorXd demean(const Eigen::VectorXd& values);

struct DiscoveryRow {
  std::string covariate;
  double coefficient = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool significant = false;
};

struct DiscoveryReport {
  std::string estimand;
  std::string method;
  double average_effect = 0.0;
  double intercept = 0.0;
  bool converged = false;
  std::vector<DiscoveryRow> rows;
};

inline constexpr double kNormalCritical95 = 1.96;

// De-means the IATEs and regresses them jointly on every binarized column
// with the Huber kernel; CIs are coefficient +/- 1.96 robust SE. Throws
// RankError naming the columns that are collinear with earlier ones.
DiscoveryReport discover(const Eigen::VectorXd& iates, const BinarizedCovariates& design,
                         double tuning = kDefaultHuberTuning);

// CSV `covariate,coefficient,ci_lower,ci_upper,significant`.
void write_discovery_csv(std::ostream& out, const DiscoveryReport& report);

}  // namespace bni
