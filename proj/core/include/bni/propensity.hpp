#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bni/bipartite.hpp"
#include "bni/cells.hpp"
#include "bni/regression.hpp"

namespace bni {

struct TruncationQuantiles {
  double lower = 0.05;
  double upper = 0.95;

  bool is_identity() const { return lower == 0.0 && upper == 1.0; }
  static TruncationQuantiles identity() { return {0.0, 1.0}; }
};

// Two-stage truncation: component scores (key-associated and upwind,
// separately, across outcome units), then each joint cell across outcome units.
struct TruncationConfig {
  TruncationQuantiles component;
  TruncationQuantiles joint;

  static TruncationConfig identity() {
    return {TruncationQuantiles::identity(), TruncationQuantiles::identity()};
  }
};

struct TruncationBounds {
  double key_lower = 0.0, key_upper = 1.0;
  double upwind_lower = 0.0, upwind_upper = 1.0;
  std::array<double, 4> joint_lower{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> joint_upper{1.0, 1.0, 1.0, 1.0};
};

// Clips values below the lower_q nearest-rank quantile up to it, and values
// above the upper_q quantile down to it. Requires 0 <= lower_q < upper_q <= 1.
Eigen::VectorXd truncate_scores(const Eigen::VectorXd& scores, double lower_q, double upper_q);
// Returns the (lower, upper) clip values truncate_scores would use.
std::pair<double, double> truncation_bounds(const Eigen::VectorXd& scores, double lower_q, double upper_q);

struct InterventionPropensity {
  FittedLinearModel model;
  // P(T_j = 1) for every row of the prediction design.
  Eigen::VectorXd phi;
};

// Logistic model of T on `fit_design` (intervention covariates concatenated
// with outcome-covariate summaries); phi evaluated on `predict_design`.
InterventionPropensity fit_intervention_propensity(const Eigen::MatrixXd& fit_design,
                                                   std::span<const int> treatments,
                                                   const Eigen::MatrixXd& predict_design,
                                                   const IrlsOptions& options = {});
InterventionPropensity fit_intervention_propensity(const Eigen::MatrixXd& design,
                                                   std::span<const int> treatments,
                                                   const IrlsOptions& options = {});

struct PropensityBundle {
  Eigen::VectorXd phi;  // per intervention unit
  CellTable psi;        // per outcome row
  TruncationBounds bounds;
};

// psi_i(z,g) = phi_key(z) * phi_upwind(g) with phi(0) = 1 - phi(1), for the
// outcome units listed in `outcome_rows` (duplicates allowed). Truncation
// bounds are computed over those rows unless `fixed_bounds` is given.
PropensityBundle build_joint_propensity(const BipartiteNetwork& network, const Eigen::VectorXd& phi,
                                        std::span<const std::size_t> outcome_rows,
                                        const TruncationConfig& truncation,
                                        const TruncationBounds* fixed_bounds = nullptr);
PropensityBundle build_joint_propensity(const BipartiteNetwork& network, const Eigen::VectorXd& phi,
                                        const TruncationConfig& truncation);

// CSV `outcome_id,psi_11,psi_10,psi_01,psi_00`.
void write_propensity_csv(std::ostream& out, std::span<const std::string> outcome_ids,
                          const CellTable& psi);

}  // namespace bni
