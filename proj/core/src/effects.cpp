#include "bni/effects.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "bni/csv.hpp"
#include "bni/error.hpp"

namespace bni {

namespace {

void check_subgroup(const Subgroup& subgroup, std::size_t n) {
  if (subgroup.members.empty()) {
    throw SubgroupError("subgroup '" + subgroup.name + "' is empty");
  }
  for (std::size_t i : subgroup.members) {
    if (i >= n) throw SubgroupError("subgroup '" + subgroup.name + "' references row " + std::to_string(i));
  }
}

void check_inputs(const EstimationInputs& d) {
  const auto n = static_cast<Eigen::Index>(d.z.size());
  if (d.g.size() != d.z.size() || d.y.size() != n || d.psi.rows() != n || d.mu_hat.rows() != n) {
    throw ParameterError("estimation inputs have inconsistent lengths");
  }
}

bool in_cell(const EstimationInputs& d, std::size_t i, int z, int g) {
  return d.z[i] == z && d.g[i] == g;
}

double checked_psi(const EstimationInputs& d, std::size_t i, int z, int g) {
  const double p = d.psi(static_cast<Eigen::Index>(i), cell_index(z, g));
  if (!(p > 0.0)) {
    throw PropensityError("joint propensity for row " + std::to_string(i) + " in cell (" +
                          std::to_string(z) + "," + std::to_string(g) + ") is not positive");
  }
  return p;
}

// Inverse of (1/n) sum_k I{Z_k=z,G_k=g}/psi_k over all rows.
double stabilizer(const EstimationInputs& d, int z, int g) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (in_cell(d, k, z, g)) {
      sum += 1.0 / checked_psi(d, k, z, g);
      ++hits;
    }
  }
  if (hits == 0) {
    throw StabilizationError("no rows in cell (" + std::to_string(z) + "," + std::to_string(g) +
                             "); the stabilized weight is undefined");
  }
  return static_cast<double>(d.size()) / sum;
}

// i-th summand of the method's mean potential outcome at (z,g).
double summand(Method method, const EstimationInputs& d, std::size_t i, int z, int g, double stab) {
  const double mu = d.mu_hat(static_cast<Eigen::Index>(i), cell_index(z, g));
  if (method == Method::gcomp) return mu;
  if (!in_cell(d, i, z, g)) {
    // The indicator is zero; only check positivity of psi.
    checked_psi(d, i, z, g);
    return mu;
  }
  double w = 1.0 / checked_psi(d, i, z, g);
  if (method == Method::saipw) w *= stab;
  return w * d.y(static_cast<Eigen::Index>(i)) + (1.0 - w) * mu;
}

std::pair<Cell, Cell> contrast_cells(const EffectSpec& spec) {
  if (spec.held != 0 && spec.held != 1) throw ParameterError("held level must be 0 or 1");
  if (spec.kind == EffectKind::direct) return {{1, spec.held}, {0, spec.held}};
  return {{spec.held, 1}, {spec.held, 0}};
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::gcomp: return "G";
    case Method::aipw: return "AIPW";
    case Method::saipw: return "SAIPW";
  }
  return "?";
}

std::string to_string(EffectKind k) { return k == EffectKind::direct ? "direct" : "spillover"; }

Method parse_method(std::string_view text) {
  if (text == "G" || text == "gcomp" || text == "g") return Method::gcomp;
  if (text == "AIPW" || text == "aipw") return Method::aipw;
  if (text == "SAIPW" || text == "saipw") return Method::saipw;
  throw ConfigError("unknown method '" + std::string(text) + "' (expected G, AIPW, SAIPW)");
}

EffectKind parse_effect_kind(std::string_view text) {
  if (text == "direct" || text == "tau") return EffectKind::direct;
  if (text == "spillover" || text == "delta") return EffectKind::spillover;
  throw ConfigError("unknown estimand '" + std::string(text) + "' (expected direct, spillover)");
}

std::string EffectSpec::estimand_label() const {
  return (kind == EffectKind::direct ? "tau(" : "delta(") + std::to_string(held) + ")";
}

Subgroup Subgroup::everyone(std::size_t n) {
  Subgroup s{"all", std::vector<std::size_t>(n)};
  std::iota(s.members.begin(), s.members.end(), 0);
  return s;
}

OutcomePredictions fit_outcome_model(const NamedColumns& covariates, std::span<const int> z,
                                     std::span<const int> g, const Eigen::VectorXd& y,
                                     const Formula& formula) {
  const auto n = covariates.rows();
  if (static_cast<Eigen::Index>(z.size()) != n || static_cast<Eigen::Index>(g.size()) != n || y.size() != n) {
    throw ParameterError("outcome model inputs have inconsistent lengths");
  }
  if (!formula.references("Z") || !formula.references("G")) {
    throw ConfigError("outcome formula must include terms in Z and G");
  }
  NamedColumns cols = covariates;
  Eigen::VectorXd zc(n), gc(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    zc(i) = z[static_cast<std::size_t>(i)];
    gc(i) = g[static_cast<std::size_t>(i)];
  }
  cols.set("Z", zc);
  cols.set("G", gc);

  OutcomePredictions out;
  out.model = fit_ols(build_design(formula, cols), y);
  out.mu_hat.resize(n, 4);
  for (const auto& cell : kCells) {
    cols.set("Z", Eigen::VectorXd::Constant(n, cell.z));
    cols.set("G", Eigen::VectorXd::Constant(n, cell.g));
    out.mu_hat.col(cell_index(cell.z, cell.g)) = linear_predictor(out.model, build_design(formula, cols));
  }
  return out;
}

double gcomp_mu(const CellTable& mu_hat, int z, int g, const Subgroup& subgroup) {
  check_subgroup(subgroup, static_cast<std::size_t>(mu_hat.rows()));
  double sum = 0.0;
  for (std::size_t i : subgroup.members) sum += mu_hat(static_cast<Eigen::Index>(i), cell_index(z, g));
  return sum / static_cast<double>(subgroup.members.size());
}

double aipw_mu(const EstimationInputs& data, int z, int g, const Subgroup& subgroup) {
  return mean_potential_outcome(Method::aipw, data, z, g, subgroup);
}

double saipw_mu(const EstimationInputs& data, int z, int g, const Subgroup& subgroup) {
  return mean_potential_outcome(Method::saipw, data, z, g, subgroup);
}

double mean_potential_outcome(Method method, const EstimationInputs& data, int z, int g,
                              const Subgroup& subgroup) {
  check_inputs(data);
  if (method == Method::gcomp) return gcomp_mu(data.mu_hat, z, g, subgroup);
  check_subgroup(subgroup, data.size());
  const double stab = method == Method::saipw ? stabilizer(data, z, g) : 1.0;
  double sum = 0.0;
  for (std::size_t i : subgroup.members) sum += summand(method, data, i, z, g, stab);
  return sum / static_cast<double>(subgroup.members.size());
}

EffectEstimate effect(const EstimationInputs& data, const EffectSpec& spec, const Subgroup& subgroup) {
  const auto [hi, lo] = contrast_cells(spec);
  EffectEstimate e;
  e.spec = spec;
  e.subgroup = subgroup.name;
  e.n_x = subgroup.members.size();
  e.estimate = mean_potential_outcome(spec.method, data, hi.z, hi.g, subgroup) -
               mean_potential_outcome(spec.method, data, lo.z, lo.g, subgroup);
  return e;
}

EffectEstimate effect(const EstimationInputs& data, const EffectSpec& spec) {
  return effect(data, spec, Subgroup::everyone(data.size()));
}

Eigen::VectorXd iate(const EstimationInputs& data, const EffectSpec& spec) {
  check_inputs(data);
  const auto [hi, lo] = contrast_cells(spec);
  const bool stabilized = spec.method == Method::saipw;
  const double stab_hi = stabilized ? stabilizer(data, hi.z, hi.g) : 1.0;
  const double stab_lo = stabilized ? stabilizer(data, lo.z, lo.g) : 1.0;
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = summand(spec.method, data, i, hi.z, hi.g, stab_hi) -
                                        summand(spec.method, data, i, lo.z, lo.g, stab_lo);
  }
  return out;
}

double percent_absolute_bias(double estimate, double truth, double xi) {
  if (xi == 0.0) throw ParameterError("percent absolute bias needs a nonzero PATE");
  return std::abs(estimate - truth) / std::abs(xi) * 100.0;
}

void write_estimates_csv(std::ostream& out, std::span<const EffectEstimate> estimates) {
  CsvWriter w(out);
  w.row({"estimand", "held_level", "method", "subgroup", "n_x", "estimate", "ci_lower", "ci_upper"});
  for (const auto& e : estimates) {
    w.field(to_string(e.spec.kind)).field(e.spec.held).field(to_string(e.spec.method));
    w.field(e.subgroup).field(e.n_x).field(e.estimate);
    if (e.ci) {
      w.field(e.ci->first).field(e.ci->second);
    } else {
      w.field("NA").field("NA");
    }
    w.end_row();
  }
}

}  // namespace bni
