#include "bni/propensity.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <ostream>

#include "bni/csv.hpp"
#include "bni/error.hpp"

namespace bni {

namespace {

void check_quantiles(const TruncationQuantiles& q) {
  if (!(q.lower >= 0.0 && q.lower < q.upper && q.upper <= 1.0)) {
    throw ParameterError("truncation quantiles must satisfy 0 <= lower < upper <= 1, got (" +
                         format_double(q.lower) + ", " + format_double(q.upper) + ")");
  }
}

Eigen::VectorXd clip(const Eigen::VectorXd& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

std::pair<double, double> truncation_bounds(const Eigen::VectorXd& scores, double lower_q, double upper_q) {
  check_quantiles({lower_q, upper_q});
  if (scores.size() == 0) throw ParameterError("truncate_scores: empty input");
  std::span<const double> values(scores.data(), static_cast<std::size_t>(scores.size()));
  return {quantile(values, lower_q), quantile(values, upper_q)};
}

Eigen::VectorXd truncate_scores(const Eigen::VectorXd& scores, double lower_q, double upper_q) {
  const auto [lo, hi] = truncation_bounds(scores, lower_q, upper_q);
  return clip(scores, lo, hi);
}

InterventionPropensity fit_intervention_propensity(const Eigen::MatrixXd& fit_design,
                                                   std::span<const int> treatments,
                                                   const Eigen::MatrixXd& predict_design,
                                                   const IrlsOptions& options) {
  if (treatments.size() != static_cast<std::size_t>(fit_design.rows())) {
    throw ParameterError("propensity design has " + std::to_string(fit_design.rows()) +
                         " rows but " + std::to_string(treatments.size()) + " treatments");
  }
  Eigen::VectorXd y(fit_design.rows());
  for (std::size_t j = 0; j < treatments.size(); ++j) y(static_cast<Eigen::Index>(j)) = treatments[j];
  InterventionPropensity out;
  out.model = fit_logistic(fit_design, y, options);
  out.phi = predict_logistic(out.model, predict_design);
  return out;
}

InterventionPropensity fit_intervention_propensity(const Eigen::MatrixXd& design,
                                                   std::span<const int> treatments,
                                                   const IrlsOptions& options) {
  return fit_intervention_propensity(design, treatments, design, options);
}

PropensityBundle build_joint_propensity(const BipartiteNetwork& network, const Eigen::VectorXd& phi,
                                        std::span<const std::size_t> outcome_rows,
                                        const TruncationConfig& truncation,
                                        const TruncationBounds* fixed_bounds) {
  if (!network.derived()) throw ParameterError("joint propensity requires a derived network");
  if (network.mapping().upwind_size != 1) {
    throw ParameterError("joint propensity is implemented for single-unit upwind sets only");
  }
  if (static_cast<std::size_t>(phi.size()) != network.num_interventions()) {
    throw PropensityError("phi covers " + std::to_string(phi.size()) + " of " +
                          std::to_string(network.num_interventions()) + " intervention units");
  }
  check_quantiles(truncation.component);
  check_quantiles(truncation.joint);

  const auto n = static_cast<Eigen::Index>(outcome_rows.size());
  Eigen::VectorXd key(n), upwind(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = outcome_rows[static_cast<std::size_t>(k)];
    key(k) = phi(static_cast<Eigen::Index>(network.key_of(i)));
    upwind(k) = phi(static_cast<Eigen::Index>(network.upwind_of(i).front()));
  }
  if (!key.allFinite() || !upwind.allFinite() || (n > 0 && (key.minCoeff() <= 0.0 || key.maxCoeff() >= 1.0 ||
                                                             upwind.minCoeff() <= 0.0 || upwind.maxCoeff() >= 1.0))) {
    throw PropensityError("intervention propensities must lie strictly inside (0, 1)");
  }

  PropensityBundle bundle;
  bundle.phi = phi;
  TruncationBounds& b = bundle.bounds;
  if (fixed_bounds) {
    b = *fixed_bounds;
  } else if (n > 0) {
    if (!truncation.component.is_identity()) {
      std::tie(b.key_lower, b.key_upper) =
          truncation_bounds(key, truncation.component.lower, truncation.component.upper);
      std::tie(b.upwind_lower, b.upwind_upper) =
          truncation_bounds(upwind, truncation.component.lower, truncation.component.upper);
    }
  }
  if (fixed_bounds || !truncation.component.is_identity()) {
    key = clip(key, b.key_lower, b.key_upper);
    upwind = clip(upwind, b.upwind_lower, b.upwind_upper);
  }

  bundle.psi.resize(n, 4);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (const auto& cell : kCells) {
      const double pk = cell.z == 1 ? key(k) : 1.0 - key(k);
      const double pg = cell.g == 1 ? upwind(k) : 1.0 - upwind(k);
      bundle.psi(k, cell_index(cell.z, cell.g)) = pk * pg;
    }
  }

  if (fixed_bounds || !truncation.joint.is_identity()) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      auto& lo = b.joint_lower[static_cast<std::size_t>(c)];
      auto& hi = b.joint_upper[static_cast<std::size_t>(c)];
      if (!fixed_bounds && n > 0) {
        std::tie(lo, hi) = truncation_bounds(bundle.psi.col(c), truncation.joint.lower, truncation.joint.upper);
      }
      bundle.psi.col(c) = clip(bundle.psi.col(c), lo, hi);
    }
  }
  return bundle;
}

PropensityBundle build_joint_propensity(const BipartiteNetwork& network, const Eigen::VectorXd& phi,
                                        const TruncationConfig& truncation) {
  std::vector<std::size_t> rows(network.num_outcomes());
  std::iota(rows.begin(), rows.end(), 0);
  return build_joint_propensity(network, phi, rows, truncation);
}

void write_propensity_csv(std::ostream& out, std::span<const std::string> outcome_ids, const CellTable& psi) {
  CsvWriter w(out);
  w.row({"outcome_id", "psi_11", "psi_10", "psi_01", "psi_00"});
  for (Eigen::Index k = 0; k < psi.rows(); ++k) {
    w.field(outcome_ids[static_cast<std::size_t>(k)]);
    for (Eigen::Index c = 0; c < 4; ++c) w.field(psi(k, c));
    w.end_row();
  }
}

}  // namespace bni
