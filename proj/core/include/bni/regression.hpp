#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bni {

enum class ModelFamily { logistic, gaussian, huber };

// Coefficients are intercept-first: size = design columns + 1.
struct FittedLinearModel {
  Eigen::VectorXd coefficients;
  ModelFamily family = ModelFamily::gaussian;
  bool converged = false;
  int iterations = 0;
  std::optional<Eigen::VectorXd> coefficient_se;
  // Residual scale (gaussian: sqrt(RSS/(n-p)); huber: final MAD scale).
  double scale = 0.0;
  // Log-likelihood per IRLS iterate (logistic only), starting at the initial point.
  std::vector<double> objective_trace;
};

struct IrlsOptions {
  int max_iter = 100;
  double tol = 1e-8;
  // Coefficient L2 norm beyond which a logistic fit is declared separated.
  double separation_norm = 1e4;
};

inline constexpr double kDefaultHuberTuning = 1.345;

// Prepends a column of ones.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& design);

Eigen::VectorXd linear_predictor(const FittedLinearModel& model, const Eigen::MatrixXd& design);

// Maximum-likelihood logistic regression by IRLS (Newton) with step halving.
// Stops when the largest absolute score component drops below tol.
FittedLinearModel fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               const IrlsOptions& options = {});
Eigen::VectorXd predict_logistic(const FittedLinearModel& model, const Eigen::MatrixXd& design);

// Working quantities of the logistic likelihood at `coefficients`
// (intercept-first) for an un-augmented design.
double logistic_log_likelihood(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y);
Eigen::VectorXd logistic_score(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y);

FittedLinearModel fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

// Huber M-estimation by IRLS: weights min(1, c*s/|r|), s = MAD/0.6745 of the
// current residuals. Non-convergence returns converged = false with the last
// iterate. coefficient_se uses Huber's asymptotic covariance with the
// small-sample kappa correction.
FittedLinearModel fit_huber(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                            double tuning = kDefaultHuberTuning, const IrlsOptions& options = {});

// Nearest-rank quantile: smallest value whose cumulative proportion >= p.
double quantile(std::span<const double> values, double p);
// 1-based rank ceil(p*N), clamped to [1, N].
std::size_t nearest_rank(std::size_t count, double p);

inline double inverse_logit(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace bni
