#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bni/cells.hpp"
#include "bni/formula.hpp"
#include "bni/regression.hpp"

namespace bni {

enum class Method { gcomp, aipw, saipw };
enum class EffectKind { direct, spillover };

std::string to_string(Method m);      // "G", "AIPW", "SAIPW"
std::string to_string(EffectKind k);  // "direct", "spillover"
Method parse_method(std::string_view text);
EffectKind parse_effect_kind(std::string_view text);

// Direct effect tau(g) holds the upwind level g; spillover delta(z) holds z.
struct EffectSpec {
  Method method = Method::aipw;
  EffectKind kind = EffectKind::direct;
  int held = 0;

  // "tau(0)", "delta(1)", ...
  std::string estimand_label() const;
  friend bool operator==(const EffectSpec&, const EffectSpec&) = default;
};

// Member positions into the estimation rows.
struct Subgroup {
  std::string name;
  std::vector<std::size_t> members;

  static Subgroup everyone(std::size_t n);
};

struct EffectEstimate {
  EffectSpec spec;
  std::string subgroup = "all";
  std::size_t n_x = 0;
  double estimate = 0.0;
  std::optional<std::pair<double, double>> ci;
};

struct OutcomePredictions {
  FittedLinearModel model;
  CellTable mu_hat;
};

// Fits OLS of y on the formula evaluated over `covariates` plus columns `Z`
// and `G` taken from the assignment, then predicts every row at each of the
// four (z,g) cells with covariates held at their observed values.
OutcomePredictions fit_outcome_model(const NamedColumns& covariates, std::span<const int> z,
                                     std::span<const int> g, const Eigen::VectorXd& y,
                                     const Formula& formula);

// Observed data and nuisance estimates for one set of outcome rows.
struct EstimationInputs {
  Eigen::VectorXd y;
  std::vector<int> z;
  std::vector<int> g;
  CellTable psi;
  CellTable mu_hat;

  std::size_t size() const { return z.size(); }
};

double gcomp_mu(const CellTable& mu_hat, int z, int g, const Subgroup& subgroup);
double aipw_mu(const EstimationInputs& data, int z, int g, const Subgroup& subgroup);
// Normalization factor uses all rows, not only subgroup members.
double saipw_mu(const EstimationInputs& data, int z, int g, const Subgroup& subgroup);
double mean_potential_outcome(Method method, const EstimationInputs& data, int z, int g,
                              const Subgroup& subgroup);

EffectEstimate effect(const EstimationInputs& data, const EffectSpec& spec, const Subgroup& subgroup);
EffectEstimate effect(const EstimationInputs& data, const EffectSpec& spec);

// Per-row summand contrast of the method's two mean-potential-outcome sums;
// its mean equals effect(data, spec).estimate.
Eigen::VectorXd iate(const EstimationInputs& data, const EffectSpec& spec);

// |est - truth| / xi * 100. Throws ParameterError when xi == 0.
double percent_absolute_bias(double estimate, double truth, double xi);

// CSV `estimand,held_level,method,subgroup,n_x,estimate,ci_lower,ci_upper`.
void write_estimates_csv(std::ostream& out, std::span<const EffectEstimate> estimates);

}  // namespace bni
