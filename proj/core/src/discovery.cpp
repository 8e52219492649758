#include "bni/discovery.hpp"

#include <algorithm>
#include <ostream>

#include "bni/csv.hpp"
#include "bni/error.hpp"

namespace bni {

BinarizedCovariates binarize_at_median(const NamedColumns& covariates,
                                       const std::vector<std::string>& columns) {
  BinarizedCovariates out;
  const auto n = covariates.rows();
  out.values.resize(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Eigen::VectorXd& col = covariates.get(columns[c]);
    if (n == 0 || col.minCoeff() == col.maxCoeff()) {
      throw DegenerateError("covariate '" + columns[c] + "' is constant and cannot be binarized");
    }
    const double cut = quantile(std::span<const double>(col.data(), static_cast<std::size_t>(n)), 0.5);
    out.names.push_back(columns[c]);
    out.cuts.push_back(cut);
    out.values.col(static_cast<Eigen::Index>(c)) = (col.array() > cut).cast<double>();
  }
  return out;
}

Eigen::VectorXd demean(const Eigen::VectorXd& values) {
  if (values.size() == 0) throw ParameterError("demean: empty input");
  return values.array() - values.mean();
}

DiscoveryReport discover(const Eigen::VectorXd& iates, const BinarizedCovariates& design, double tuning) {
  if (iates.size() != design.values.rows()) {
    throw ParameterError("discover: " + std::to_string(iates.size()) + " IATEs for " +
                         std::to_string(design.values.rows()) + " design rows");
  }
  // Collinearity diagnosis: a column that fails to raise the rank of the
  // intercept-augmented design is reported by name.
  {
    std::vector<std::string> offending;
    Eigen::MatrixXd accepted = Eigen::MatrixXd::Ones(design.values.rows(), 1);
    for (Eigen::Index c = 0; c < design.values.cols(); ++c) {
      Eigen::MatrixXd trial(accepted.rows(), accepted.cols() + 1);
      trial << accepted, design.values.col(c);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
      if (qr.rank() < trial.cols()) {
        offending.push_back(design.names[static_cast<std::size_t>(c)]);
      } else {
        accepted = std::move(trial);
      }
    }
    if (!offending.empty()) {
      std::string list;
      for (const auto& name : offending) list += (list.empty() ? "" : ", ") + name;
      throw RankError("discover: binarized design is collinear in column(s): " + list);
    }
  }

  DiscoveryReport report;
  report.average_effect = iates.size() ? iates.mean() : 0.0;
  const Eigen::VectorXd centered = demean(iates);
  const FittedLinearModel fit = fit_huber(design.values, centered, tuning);
  report.converged = fit.converged;
  report.intercept = fit.coefficients(0);
  for (Eigen::Index c = 0; c < design.values.cols(); ++c) {
    DiscoveryRow row;
    row.covariate = design.names[static_cast<std::size_t>(c)];
    row.coefficient = fit.coefficients(c + 1);
    const double se = (*fit.coefficient_se)(c + 1);
    row.ci_lower = row.coefficient - kNormalCritical95 * se;
    row.ci_upper = row.coefficient + kNormalCritical95 * se;
    row.significant = row.ci_lower > 0.0 || row.ci_upper < 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_discovery_csv(std::ostream& out, const DiscoveryReport& report) {
  CsvWriter w(out);
  w.row({"covariate", "coefficient", "ci_lower", "ci_upper", "significant"});
  for (const auto& r : report.rows) {
    w.field(r.covariate).field(r.coefficient).field(r.ci_lower).field(r.ci_upper);
    w.field(r.significant ? "1" : "0");
    w.end_row();
  }
}

}  // namespace bni
