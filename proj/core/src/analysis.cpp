#include "bni/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "bni/csv.hpp"
#include "bni/error.hpp"

namespace bni {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

AnalysisDataset assemble_dataset(BipartiteNetwork network, const UnitTable& interventions,
                                 const UnitTable& outcomes) {
  if (!network.derived()) throw ParameterError("assemble_dataset requires a derived network");
  AnalysisDataset d;
  d.interventions = align_table(interventions, network.intervention_ids());
  d.outcomes = align_table(outcomes, network.outcome_ids());
  if (!d.interventions.treatment) {
    throw MappingError("intervention table has no treatment column");
  }
  for (const auto& c : d.outcomes.columns) {
    if (c == "Z" || c == "G") {
      throw FormatError("outcome covariate name '" + c + "' is reserved for the exposure columns");
    }
  }

  const auto J = static_cast<Eigen::Index>(network.num_interventions());
  const auto n = static_cast<Eigen::Index>(network.num_outcomes());
  d.intervention_columns = NamedColumns(J);
  for (std::size_t c = 0; c < d.interventions.columns.size(); ++c) {
    d.intervention_columns.set(d.interventions.columns[c],
                               d.interventions.covariates.col(static_cast<Eigen::Index>(c)));
  }
  for (Role role : {Role::key, Role::upwind}) {
    const CovariateSummary s = summarize_outcome_covariates(network, d.outcomes, role).imputed();
    for (std::size_t c = 0; c < s.columns.size(); ++c) {
      d.intervention_columns.set(s.columns[c], s.values.col(static_cast<Eigen::Index>(c)));
      d.summary_columns.push_back(s.columns[c]);
    }
  }

  d.outcome_columns = NamedColumns(n);
  for (std::size_t c = 0; c < d.outcomes.columns.size(); ++c) {
    d.outcome_columns.set(d.outcomes.columns[c], d.outcomes.covariates.col(static_cast<Eigen::Index>(c)));
  }
  for (std::size_t c = 0; c < d.interventions.columns.size(); ++c) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = d.interventions.covariates(static_cast<Eigen::Index>(network.key_of(static_cast<std::size_t>(i))),
                                        static_cast<Eigen::Index>(c));
    }
    d.outcome_columns.set("key_" + d.interventions.columns[c], std::move(v));
  }

  d.assignment = map_treatments(network, *d.interventions.treatment);
  d.network = std::move(network);
  return d;
}

AnalysisDataset filter_dataset(const AnalysisDataset& dataset, double q) {
  FilterResult f = filter_low_influence(dataset.network, q);
  return assemble_dataset(std::move(f.network), dataset.interventions.subset(f.kept_interventions),
                          dataset.outcomes.subset(f.kept_outcomes));
}

std::vector<std::size_t> trim_outcome_rows(const Eigen::VectorXd& y, double q) {
  if (!(q >= 0.0 && q < 0.5)) throw ParameterError("trim fraction must lie in [0, 0.5)");
  if (q == 0.0) return all_rows(static_cast<std::size_t>(y.size()));
  std::span<const double> values(y.data(), static_cast<std::size_t>(y.size()));
  const double lo = quantile(values, q);
  const double hi = quantile(values, 1.0 - q);
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) >= lo && y(i) <= hi) rows.push_back(static_cast<std::size_t>(i));
  }
  return rows;
}

Subgroup SubgroupDefinition::restrict_to(std::span<const std::size_t> rows) const {
  Subgroup s;
  s.name = name;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (mask[rows[k]]) s.members.push_back(k);
  }
  return s;
}

SubgroupDefinition parse_subgroup(const AnalysisDataset& dataset, std::string_view name,
                                  std::string_view expression) {
  SubgroupDefinition def;
  def.name = std::string(name);
  const auto n = static_cast<std::size_t>(dataset.outcome_columns.rows());
  def.mask.assign(n, 1);
  std::size_t start = 0;
  for (;;) {
    const auto amp = expression.find('&', start);
    const auto clause = strip(expression.substr(start, amp == std::string_view::npos ? amp : amp - start));
    static constexpr std::string_view ops[] = {"<=", ">=", "==", "!=", "<", ">"};
    std::size_t pos = std::string_view::npos;
    std::string_view op;
    for (auto candidate : ops) {
      const auto p = clause.find(candidate);
      if (p != std::string_view::npos && (pos == std::string_view::npos || p < pos ||
                                          (p == pos && candidate.size() > op.size()))) {
        pos = p;
        op = candidate;
      }
    }
    if (pos == std::string_view::npos) {
      throw ConfigError("subgroup '" + def.name + "': clause '" + std::string(clause) + "' has no comparison");
    }
    const auto column = strip(clause.substr(0, pos));
    const auto value = parse_double(strip(clause.substr(pos + op.size())));
    if (!value) {
      throw ConfigError("subgroup '" + def.name + "': clause '" + std::string(clause) + "' needs a numeric value");
    }
    if (!dataset.outcome_columns.has(column)) {
      throw ConfigError("subgroup '" + def.name + "': unknown column '" + std::string(column) + "'");
    }
    const auto& col = dataset.outcome_columns.get(column);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = col(static_cast<Eigen::Index>(i));
      bool ok = false;
      if (op == "<") ok = x < *value;
      else if (op == "<=") ok = x <= *value;
      else if (op == ">") ok = x > *value;
      else if (op == ">=") ok = x >= *value;
      else if (op == "==") ok = x == *value;
      else ok = x != *value;
      if (!ok) def.mask[i] = 0;
    }
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  return def;
}

std::vector<std::size_t> retained_interventions(const BipartiteNetwork& network,
                                                std::span<const std::size_t> rows) {
  std::vector<char> used(network.num_interventions(), 0);
  for (std::size_t i : rows) {
    used[network.key_of(i)] = 1;
    for (std::size_t j : network.upwind_of(i)) used[j] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j]) out.push_back(j);
  }
  return out;
}

PropensityStage fit_propensity_stage(const AnalysisDataset& dataset, const Formula& formula,
                                     const TruncationConfig& truncation, std::span<const std::size_t> rows,
                                     const IrlsOptions& irls, const TruncationBounds* fixed_bounds) {
  PropensityStage stage;
  stage.retained = retained_interventions(dataset.network, rows);
  const Eigen::MatrixXd design = build_design(formula, dataset.intervention_columns);
  Eigen::MatrixXd fit_design(static_cast<Eigen::Index>(stage.retained.size()), design.cols());
  std::vector<int> t;
  t.reserve(stage.retained.size());
  for (std::size_t k = 0; k < stage.retained.size(); ++k) {
    fit_design.row(static_cast<Eigen::Index>(k)) = design.row(static_cast<Eigen::Index>(stage.retained[k]));
    t.push_back((*dataset.interventions.treatment)[stage.retained[k]]);
  }
  stage.fit = fit_intervention_propensity(fit_design, t, design, irls);
  stage.bundle = build_joint_propensity(dataset.network, stage.fit.phi, rows, truncation, fixed_bounds);
  return stage;
}

OutcomePredictions fit_outcome_stage(const AnalysisDataset& dataset, const Formula& formula,
                                     std::span<const std::size_t> rows, const Eigen::VectorXd& y_full) {
  const NamedColumns cols = dataset.outcome_columns.subset(rows);
  std::vector<int> z, g;
  z.reserve(rows.size());
  g.reserve(rows.size());
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    z.push_back(dataset.assignment.z[rows[k]]);
    g.push_back(dataset.assignment.g[rows[k]]);
    y(static_cast<Eigen::Index>(k)) = y_full(static_cast<Eigen::Index>(rows[k]));
  }
  return fit_outcome_model(cols, z, g, y, formula);
}

EstimationInputs gather_inputs(const AnalysisDataset& dataset, std::span<const std::size_t> rows,
                               const Eigen::VectorXd& y_full, const CellTable& psi, const CellTable& mu_hat) {
  EstimationInputs in;
  in.y.resize(static_cast<Eigen::Index>(rows.size()));
  in.z.reserve(rows.size());
  in.g.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    in.z.push_back(dataset.assignment.z[rows[k]]);
    in.g.push_back(dataset.assignment.g[rows[k]]);
    in.y(static_cast<Eigen::Index>(k)) = y_full(static_cast<Eigen::Index>(rows[k]));
  }
  in.psi = psi;
  in.mu_hat = mu_hat;
  return in;
}

AnalysisResult run_analysis(const AnalysisDataset& dataset, const EstimatorConfig& config,
                            std::span<const std::size_t> rows, const TruncationBounds* fixed_bounds) {
  if (!dataset.outcomes.outcome) throw MappingError("outcome table has no outcome column");
  const Eigen::VectorXd& y = *dataset.outcomes.outcome;
  AnalysisResult r;
  r.propensity = fit_propensity_stage(dataset, config.propensity_formula, config.truncation, rows,
                                      config.irls, fixed_bounds);
  r.outcome = fit_outcome_stage(dataset, config.outcome_formula, rows, y);
  r.inputs = gather_inputs(dataset, rows, y, r.propensity.bundle.psi, r.outcome.mu_hat);

  const Subgroup population = Subgroup::everyone(rows.size());
  for (const auto& spec : config.effects) r.estimates.push_back(effect(r.inputs, spec, population));
  for (const auto& def : config.subgroups) {
    const Subgroup s = def.restrict_to(rows);
    for (const auto& spec : config.effects) r.estimates.push_back(effect(r.inputs, spec, s));
  }
  return r;
}

AnalysisResult run_analysis(const AnalysisDataset& dataset, const EstimatorConfig& config) {
  const auto rows = all_rows(dataset.network.num_outcomes());
  return run_analysis(dataset, config, rows);
}

}  // namespace bni
