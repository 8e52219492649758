#include "bni/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bni/error.hpp"

namespace bni {

namespace {

void check_shape(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const char* what) {
  if (design.rows() != y.size()) {
    throw ParameterError(std::string(what) + ": design has " + std::to_string(design.rows()) +
                         " rows but response has " + std::to_string(y.size()));
  }
  if (design.rows() < design.cols() + 1) {
    throw RankError(std::string(what) + ": " + std::to_string(design.rows()) +
                    " observations cannot identify " + std::to_string(design.cols() + 1) +
                    " coefficients");
  }
  if (!design.allFinite() || !y.allFinite()) {
    throw ParameterError(std::string(what) + ": non-finite input");
  }
}

// Least-squares solve with an explicit rank check.
Eigen::VectorXd solve_full_rank(const Eigen::MatrixXd& x, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < x.cols()) {
    throw RankError(std::string(what) + ": design is rank deficient (rank " +
                    std::to_string(qr.rank()) + " of " + std::to_string(x.cols()) + ")");
  }
  return qr.solve(rhs);
}

Eigen::MatrixXd gram_inverse(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  return gram.ldlt().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

double median_of(std::vector<double> v) {
  return quantile(v, 0.5);
}

}  // namespace

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& design) {
  Eigen::MatrixXd x(design.rows(), design.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(design.cols()) = design;
  return x;
}

Eigen::VectorXd linear_predictor(const FittedLinearModel& model, const Eigen::MatrixXd& design) {
  if (design.cols() + 1 != model.coefficients.size()) {
    throw ParameterError("design has " + std::to_string(design.cols()) + " columns; model expects " +
                         std::to_string(model.coefficients.size() - 1));
  }
  Eigen::VectorXd eta = design * model.coefficients.tail(design.cols());
  eta.array() += model.coefficients(0);
  return eta;
}

double logistic_log_likelihood(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double eta = coefficients(0) + design.row(i).dot(coefficients.tail(design.cols()));
    // log(1 + e^eta) without overflow
    const double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    ll += y(i) * eta - softplus;
  }
  return ll;
}

Eigen::VectorXd logistic_score(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y) {
  const Eigen::MatrixXd x = with_intercept(design);
  Eigen::VectorXd resid(y.size());
  const Eigen::VectorXd eta = x * coefficients;
  for (Eigen::Index i = 0; i < y.size(); ++i) resid(i) = y(i) - inverse_logit(eta(i));
  return x.transpose() * resid;
}

FittedLinearModel fit_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               const IrlsOptions& options) {
  check_shape(design, y, "fit_logistic");
  Eigen::Index ones = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw ParameterError("fit_logistic: response must be binary");
    if (y(i) == 1.0) ++ones;
  }
  if (ones == 0 || ones == y.size()) {
    throw DegenerateError("fit_logistic: response contains a single class");
  }

  const Eigen::MatrixXd x = with_intercept(design);
  const Eigen::Index p = x.cols();
  FittedLinearModel model;
  model.family = ModelFamily::logistic;
  model.coefficients = Eigen::VectorXd::Zero(p);
  double ll = logistic_log_likelihood(model.coefficients, design, y);
  model.objective_trace.push_back(ll);

  Eigen::VectorXd prob(y.size());
  Eigen::VectorXd weight(y.size());
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd eta = x * model.coefficients;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      prob(i) = inverse_logit(eta(i));
      weight(i) = prob(i) * (1.0 - prob(i));
    }
    const Eigen::VectorXd score = x.transpose() * (y - prob);
    model.iterations = iter;
    if (score.cwiseAbs().maxCoeff() < options.tol) {
      model.converged = true;
      break;
    }
    if (iter == options.max_iter) break;

    const Eigen::MatrixXd xw = x.array().colwise() * weight.array().sqrt();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
    if (qr.rank() < p) {
      throw RankError("fit_logistic: weighted normal equations are singular (rank " +
                      std::to_string(qr.rank()) + " of " + std::to_string(p) + ")");
    }
    const Eigen::MatrixXd info = xw.transpose() * xw;
    const Eigen::VectorXd step = info.ldlt().solve(score);

    double t = 1.0;
    Eigen::VectorXd candidate = model.coefficients + step;
    double ll_new = logistic_log_likelihood(candidate, design, y);
    for (int halving = 0; halving < 40 && !(ll_new >= ll); ++halving) {
      t *= 0.5;
      candidate = model.coefficients + t * step;
      ll_new = logistic_log_likelihood(candidate, design, y);
    }
    if (!(ll_new >= ll)) {
      // No ascent direction left at machine precision.
      model.converged = score.cwiseAbs().maxCoeff() < std::sqrt(options.tol);
      break;
    }
    const bool stalled = (candidate - model.coefficients).cwiseAbs().maxCoeff() <
                         1e-15 * (1.0 + model.coefficients.cwiseAbs().maxCoeff());
    model.coefficients = candidate;
    ll = ll_new;
    model.objective_trace.push_back(ll);
    if (model.coefficients.norm() > options.separation_norm) {
      throw SeparationError("fit_logistic: coefficients diverge (L2 norm > " +
                            std::to_string(options.separation_norm) + "); the classes are separated");
    }
    if (stalled) {
      model.iterations = iter + 1;
      model.converged = true;
      break;
    }
  }

  // Complete separation drives every fitted probability onto its label while
  // the score vanishes; treat that as separation too.
  const Eigen::VectorXd eta = x * model.coefficients;
  bool all_fitted = true;
  for (Eigen::Index i = 0; i < y.size() && all_fitted; ++i) {
    all_fitted = std::abs(y(i) - inverse_logit(eta(i))) < 1e-6;
  }
  if (all_fitted) {
    throw SeparationError("fit_logistic: every observation is fitted to its label; the classes are separated");
  }

  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double pi = inverse_logit(eta(i));
    weight(i) = pi * (1.0 - pi);
  }
  const Eigen::MatrixXd xw = x.array().colwise() * weight.array().sqrt();
  model.coefficient_se = gram_inverse(xw).diagonal().cwiseSqrt();
  return model;
}

Eigen::VectorXd predict_logistic(const FittedLinearModel& model, const Eigen::MatrixXd& design) {
  Eigen::VectorXd eta = linear_predictor(model, design);
  return eta.unaryExpr([](double v) { return inverse_logit(v); });
}

FittedLinearModel fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  check_shape(design, y, "fit_ols");
  const Eigen::MatrixXd x = with_intercept(design);
  FittedLinearModel model;
  model.family = ModelFamily::gaussian;
  model.coefficients = solve_full_rank(x, y, "fit_ols");
  model.converged = true;
  model.iterations = 1;
  const Eigen::VectorXd resid = y - x * model.coefficients;
  const double dof = static_cast<double>(x.rows() - x.cols());
  model.scale = dof > 0 ? std::sqrt(resid.squaredNorm() / dof) : 0.0;
  model.coefficient_se = (gram_inverse(x).diagonal() * model.scale * model.scale).cwiseSqrt();
  return model;
}

FittedLinearModel fit_huber(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double tuning,
                            const IrlsOptions& options) {
  if (!(tuning > 0.0)) throw ParameterError("fit_huber: tuning constant must be positive");
  check_shape(design, y, "fit_huber");
  const Eigen::MatrixXd x = with_intercept(design);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  FittedLinearModel model;
  model.family = ModelFamily::huber;
  model.coefficients = solve_full_rank(x, y, "fit_huber");

  const double y_scale = 1.0 + y.cwiseAbs().maxCoeff();
  const auto mad_scale = [&](const Eigen::VectorXd& r) {
    std::vector<double> rv(r.data(), r.data() + r.size());
    const double med = median_of(rv);
    for (auto& v : rv) v = std::abs(v - med);
    return median_of(std::move(rv)) / 0.6745;
  };

  Eigen::VectorXd resid = y - x * model.coefficients;
  double s = mad_scale(resid);
  Eigen::VectorXd w(n);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    model.iterations = iter;
    if (s <= 1e-12 * y_scale) {
      // Exact fit on at least half the data; all weights 1.
      model.converged = true;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(resid(i));
      w(i) = a <= tuning * s ? 1.0 : tuning * s / a;
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const Eigen::MatrixXd xw = x.array().colwise() * sw.array();
    const Eigen::VectorXd next = solve_full_rank(xw, y.cwiseProduct(sw), "fit_huber");
    const double change = (next - model.coefficients).cwiseAbs().maxCoeff();
    model.coefficients = next;
    resid = y - x * model.coefficients;
    s = mad_scale(resid);
    if (change < options.tol * (1.0 + model.coefficients.cwiseAbs().maxCoeff())) {
      model.converged = true;
      break;
    }
  }
  model.scale = s;

  const double zero_tol = 1e-6 * y_scale;
  const auto exact = (resid.array().abs() <= zero_tol).count();
  if (2 * exact >= n && exact < n) {
    throw DegenerateError("fit_huber: " + std::to_string(exact) + " of " + std::to_string(n) +
                          " residuals are exactly zero, so the MAD scale collapses");
  }

  Eigen::VectorXd se;
  if (s <= 1e-12 * y_scale) {
    const double dof = static_cast<double>(n - p);
    const double sigma = dof > 0 ? std::sqrt(resid.squaredNorm() / dof) : 0.0;
    se = (gram_inverse(x).diagonal() * sigma * sigma).cwiseSqrt();
  } else {
    double psi_sq = 0.0;
    double dpsi_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = resid(i) / s;
      const double psi = std::clamp(u, -tuning, tuning);
      psi_sq += psi * psi;
      dpsi_sum += std::abs(u) <= tuning ? 1.0 : 0.0;
    }
    const double nd = static_cast<double>(n);
    const double m = dpsi_sum / nd;
    if (m <= 0.0) throw DegenerateError("fit_huber: every residual lies outside the Huber core");
    const double var_dpsi = m - m * m;  // dpsi is an indicator
    const double kappa = 1.0 + static_cast<double>(p) * var_dpsi / (nd * m * m);
    const double spread = psi_sq / static_cast<double>(n - p);
    const double sigma = s * std::sqrt(spread) * kappa / m;
    se = (gram_inverse(x).diagonal() * sigma * sigma).cwiseSqrt();
  }
  model.coefficient_se = se;
  return model;
}

std::size_t nearest_rank(std::size_t count, double p) {
  if (count == 0) throw ParameterError("nearest_rank: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile level must lie in [0, 1]");
  const double scaled = p * static_cast<double>(count);
  double rank = std::ceil(scaled);
  // Absorb representation error such as 0.7 * 10 = 7.000000000000001.
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) < 1e-9 * static_cast<double>(count)) rank = nearest;
  return std::clamp<std::size_t>(static_cast<std::size_t>(rank), 1, count);
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw ParameterError("quantile: empty input");
  const std::size_t rank = nearest_rank(values.size(), p);
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

}  // namespace bni
