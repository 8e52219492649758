#include "bni/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "bni/csv.hpp"
#include "bni/error.hpp"
#include "bni/parallel.hpp"

namespace bni {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

struct Point {
  double x, y;
};

// Sum of Gaussian bumps with random centres and signs, standardized over
// the evaluation points.
Eigen::VectorXd smooth_field(const std::vector<Point>& at, Rng& rng) {
  constexpr int kBumps = 10;
  constexpr double kBandwidth = 0.2;
  std::array<Point, kBumps> centre{};
  std::array<double, kBumps> amp{};
  for (int m = 0; m < kBumps; ++m) {
    centre[m] = {rng.uniform(), rng.uniform()};
    amp[m] = rng.normal();
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(at.size()));
  for (std::size_t i = 0; i < at.size(); ++i) {
    double s = 0.0;
    for (int m = 0; m < kBumps; ++m) {
      const double dx = at[i].x - centre[m].x;
      const double dy = at[i].y - centre[m].y;
      s += amp[m] * std::exp(-(dx * dx + dy * dy) / (2.0 * kBandwidth * kBandwidth));
    }
    v(static_cast<Eigen::Index>(i)) = s;
  }
  const double mean = v.mean();
  const double sd = std::sqrt((v.array() - mean).square().mean());
  return sd > 0 ? Eigen::VectorXd((v.array() - mean) / sd) : Eigen::VectorXd(v.array() - mean);
}

// rho * field + sqrt(1 - rho^2) * N(0,1) per unit.
Eigen::VectorXd mix(const Eigen::VectorXd& field, double rho, Rng& rng) {
  Eigen::VectorXd out(field.size());
  const double noise = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < field.size(); ++i) out(i) = rho * field(i) + noise * rng.normal();
  return out;
}

std::string padded_id(char prefix, std::size_t k, std::size_t total) {
  const int width = static_cast<int>(std::to_string(total).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, k + 1);
  return buf;
}

}  // namespace

Population generate_synthetic_network(const SyntheticNetworkOptions& options, std::uint64_t seed) {
  if (options.interventions < 2) throw ParameterError("synthetic network needs at least 2 intervention units");
  if (options.outcomes < 2) throw ParameterError("synthetic network needs at least 2 outcome units");
  if (!(options.decay >= 0.0) || !(options.weight_noise_sd >= 0.0)) {
    throw ParameterError("decay and weight noise must be nonnegative");
  }
  Rng rng(seed);
  const std::size_t J = options.interventions;
  const std::size_t n = options.outcomes;
  std::vector<Point> plants(J), units(n);
  for (auto& p : plants) p = {rng.uniform(), rng.uniform()};
  for (auto& u : units) u = {rng.uniform(), rng.uniform()};

  Population pop;
  std::vector<InfluenceTriplet> rows;
  rows.reserve(J * n);
  std::vector<std::string> plant_ids(J), unit_ids(n);
  for (std::size_t j = 0; j < J; ++j) plant_ids[j] = padded_id('P', j, J);
  for (std::size_t i = 0; i < n; ++i) unit_ids[i] = padded_id('Z', i, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      const double d = std::hypot(units[i].x - plants[j].x, units[i].y - plants[j].y);
      const double w = std::exp(-options.decay * d + options.weight_noise_sd * rng.normal());
      rows.push_back({plant_ids[j], unit_ids[i], w});
    }
  }
  pop.network = BipartiteNetwork::from_triplets(rows);

  // Outcome-level covariates. Means follow the application covariate table;
  // PctUrban is centred lower so key-unit summaries give a treated fraction
  // near one half under the treatment model.
  const Eigen::VectorXd f_pop = smooth_field(units, rng);
  const Eigen::VectorXd f_smoke = smooth_field(units, rng);
  const Eigen::VectorXd f_school = smooth_field(units, rng);
  const Eigen::VectorXd f_poor = smooth_field(units, rng);
  const Eigen::VectorXd f_nonwhite = smooth_field(units, rng);

  const Eigen::VectorXd z_pop = mix(f_pop, 0.7, rng);
  const Eigen::VectorXd z_urban = mix(f_pop, 0.8, rng);
  const Eigen::VectorXd z_smoke = mix(f_smoke, 0.6, rng);
  const Eigen::VectorXd z_school = mix(f_school, 0.6, rng);
  const Eigen::VectorXd z_poor = mix(f_poor, 0.7, rng);
  const Eigen::VectorXd z_nonwhite = mix(f_nonwhite, 0.7, rng);

  const auto N = static_cast<Eigen::Index>(n);
  pop.outcomes.ids = unit_ids;
  pop.outcomes.columns = {simcol::log_pop, simcol::smoke_rate, simcol::pct_high_school,
                          simcol::pct_urban, simcol::pct_poor, simcol::pct_nonwhite};
  pop.outcomes.covariates.resize(N, 6);
  for (Eigen::Index i = 0; i < N; ++i) {
    pop.outcomes.covariates(i, 0) = std::clamp(8.27 + 1.2 * z_pop(i), 1.39, 11.65);
    pop.outcomes.covariates(i, 1) = std::clamp(0.26 + 0.06 * z_smoke(i), 0.10, 0.43);
    pop.outcomes.covariates(i, 2) = inverse_logit(logit(0.35) + 0.5 * z_school(i));
    pop.outcomes.covariates(i, 3) = inverse_logit(logit(0.30) + 1.2 * z_urban(i));
    pop.outcomes.covariates(i, 4) = inverse_logit(logit(0.12) + 0.6 * z_poor(i));
    pop.outcomes.covariates(i, 5) = inverse_logit(logit(0.11) + 1.0 * z_nonwhite(i));
  }

  pop.interventions.ids = plant_ids;
  pop.interventions.columns = {simcol::log_op_time};
  pop.interventions.covariates.resize(static_cast<Eigen::Index>(J), 1);
  for (std::size_t j = 0; j < J; ++j) {
    pop.interventions.covariates(static_cast<Eigen::Index>(j), 0) =
        std::clamp(7.75 + 0.6 * rng.normal(), 5.46, 8.93);
  }
  return pop;
}

Eigen::VectorXd true_treatment_probability(const NamedColumns& columns) {
  for (const char* name : {simcol::key_log_pop, simcol::key_pct_urban, simcol::log_op_time}) {
    if (!columns.has(name)) throw FormatError(std::string("treatment model needs column '") + name + "'");
  }
  const auto& klp = columns.get(simcol::key_log_pop);
  const auto& kpu = columns.get(simcol::key_pct_urban);
  const auto& lot = columns.get(simcol::log_op_time);
  Eigen::VectorXd p(columns.rows());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    p(j) = inverse_logit(0.1 * klp(j) - 1.5 * klp(j) * kpu(j) + 0.05 * lot(j) * lot(j));
  }
  return p;
}

TreatmentDraw generate_treatments(const NamedColumns& columns, Rng& rng) {
  TreatmentDraw d;
  d.probability = true_treatment_probability(columns);
  d.treatment.resize(static_cast<std::size_t>(d.probability.size()));
  for (Eigen::Index j = 0; j < d.probability.size(); ++j) {
    d.treatment[static_cast<std::size_t>(j)] = rng.bernoulli(d.probability(j)) ? 1 : 0;
  }
  return d;
}

std::string to_string(PlantedGroup g) {
  switch (g) {
    case PlantedGroup::low: return "low";
    case PlantedGroup::mid: return "mid";
    case PlantedGroup::high: return "high";
  }
  return "?";
}

std::array<std::size_t, 3> PlantedEffects::group_sizes() const {
  std::array<std::size_t, 3> sizes{};
  for (auto g : group) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

PlantedEffects plant_heterogeneity(const UnitTable& outcomes, double xi) {
  const Eigen::VectorXd nonwhite = outcomes.column(simcol::pct_nonwhite);
  const Eigen::VectorXd poor = outcomes.column(simcol::pct_poor);
  PlantedEffects p;
  p.xi = xi;
  const auto n = static_cast<std::size_t>(nonwhite.size());
  p.nonwhite_cut = quantile(std::span<const double>(nonwhite.data(), n), 0.33);
  p.poor_cut = quantile(std::span<const double>(poor.data(), n), 0.5);
  p.tau.resize(nonwhite.size());
  p.group.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    PlantedGroup g = PlantedGroup::low;
    if (nonwhite(k) > p.nonwhite_cut) g = poor(k) > p.poor_cut ? PlantedGroup::high : PlantedGroup::mid;
    p.group[i] = g;
    p.tau(k) = PlantedEffects::effect_of(g, xi);
  }
  p.delta = p.tau;
  return p;
}

Eigen::VectorXd baseline_mean(const UnitTable& outcomes) {
  const Eigen::VectorXd lp = outcomes.column(simcol::log_pop);
  const Eigen::VectorXd sr = outcomes.column(simcol::smoke_rate);
  const Eigen::VectorXd pp = outcomes.column(simcol::pct_poor);
  const Eigen::VectorXd nw = outcomes.column(simcol::pct_nonwhite);
  return (2.0 * lp + 5.0 * sr + 5.0 * pp + 10.0 * nw).array() + 5.0 * nw.array() * sr.array();
}

PotentialOutcomes generate_outcomes(const UnitTable& outcomes, const ExposureAssignment& assignment,
                                    const PlantedEffects& planted, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw ParameterError("outcome error variance must be positive");
  const Eigen::VectorXd base = baseline_mean(outcomes);
  const auto n = base.size();
  if (static_cast<std::size_t>(n) != assignment.size() || planted.tau.size() != n) {
    throw ParameterError("generate_outcomes: inconsistent unit counts");
  }
  const double sd = std::sqrt(sigma2);
  PotentialOutcomes po;
  po.table.resize(n, 4);
  po.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = sd * rng.normal();
    for (const auto& c : kCells) {
      po.table(i, cell_index(c.z, c.g)) = base(i) + planted.tau(i) * c.z + planted.delta(i) * c.g + e;
    }
    const auto k = static_cast<std::size_t>(i);
    po.y(i) = po.table(i, cell_index(assignment.z[k], assignment.g[k]));
  }
  return po;
}

std::string to_string(Misspecification m) {
  switch (m) {
    case Misspecification::A: return "A";
    case Misspecification::B: return "B";
    case Misspecification::C: return "C";
    case Misspecification::D: return "D";
  }
  return "?";
}

Misspecification parse_misspecification(std::string_view text) {
  if (text == "A") return Misspecification::A;
  if (text == "B") return Misspecification::B;
  if (text == "C") return Misspecification::C;
  if (text == "D") return Misspecification::D;
  throw ConfigError("unknown misspecification scenario '" + std::string(text) + "' (expected A-D)");
}

bool propensity_misspecified(Misspecification m) {
  return m == Misspecification::B || m == Misspecification::D;
}

bool outcome_misspecified(Misspecification m) {
  return m == Misspecification::C || m == Misspecification::D;
}

Formula correct_propensity_formula() {
  return Formula::parse("KeyLogPop + KeyLogPop:KeyPctUrban + LogOpTime^2");
}

Formula linear_propensity_formula() { return Formula::parse("KeyLogPop + KeyPctUrban + LogOpTime"); }

Formula correct_outcome_formula() {
  return Formula::parse(
      "LogPop + SmokeRate + PctPoor + PctNonwhite + PctNonwhite:SmokeRate + Z + G"
      " + Z:sg_mid + Z:sg_high + G:sg_mid + G:sg_high");
}

Formula no_interaction_outcome_formula() {
  return Formula::parse("LogPop + SmokeRate + PctPoor + PctNonwhite + Z + G");
}

void SimScenario::validate() const {
  if (!(sample_proportion > 0.0 && sample_proportion <= 1.0)) {
    throw ParameterError("sample proportion must lie in (0, 1]");
  }
  if (!(sigma2 > 0.0)) throw ParameterError("sigma2 must be positive");
  if (!std::isfinite(xi)) throw ParameterError("xi must be finite");
  if (replications < 1) throw ParameterError("replications must be at least 1");
  if (filter_low_influence && !(filter_quantile >= 0.0 && filter_quantile < 1.0)) {
    throw ParameterError("filter quantile must lie in [0, 1)");
  }
}

ScenarioSetup prepare_scenario(const SimScenario& scenario) {
  scenario.validate();
  Population pop;
  if (scenario.population) {
    pop = *scenario.population;
  } else {
    pop = generate_synthetic_network(scenario.network, derive_seed(scenario.seed, {stream::network}));
  }
  BipartiteNetwork net = derive_exposure_structure(std::move(pop.network));
  UnitTable interventions = align_table(pop.interventions, net.intervention_ids());
  UnitTable outcomes = align_table(pop.outcomes, net.outcome_ids());
  if (scenario.filter_low_influence) {
    FilterResult f = filter_low_influence(net, scenario.filter_quantile);
    interventions = interventions.subset(f.kept_interventions);
    outcomes = outcomes.subset(f.kept_outcomes);
    net = std::move(f.network);
  }

  // Treatment generation needs the key-role summaries before the dataset exists.
  ScenarioSetup setup;
  {
    const CovariateSummary key = summarize_outcome_covariates(net, outcomes, Role::key).imputed();
    NamedColumns cols(static_cast<Eigen::Index>(net.num_interventions()));
    for (std::size_t c = 0; c < key.columns.size(); ++c) {
      cols.set(key.columns[c], key.values.col(static_cast<Eigen::Index>(c)));
    }
    cols.set(simcol::log_op_time, interventions.column(simcol::log_op_time));
    Rng rng(derive_seed(scenario.seed, {stream::treatments}));
    setup.treatments = generate_treatments(cols, rng);
  }
  interventions.treatment = setup.treatments.treatment;
  setup.dataset = assemble_dataset(std::move(net), interventions, outcomes);

  setup.planted = plant_heterogeneity(setup.dataset.outcomes, scenario.xi);
  const auto n = static_cast<Eigen::Index>(setup.planted.group.size());
  Eigen::VectorXd mid(n), high(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = setup.planted.group[static_cast<std::size_t>(i)];
    mid(i) = g == PlantedGroup::mid ? 1.0 : 0.0;
    high(i) = g == PlantedGroup::high ? 1.0 : 0.0;
  }
  setup.dataset.outcome_columns.set(simcol::group_mid, mid);
  setup.dataset.outcome_columns.set(simcol::group_high, high);

  setup.propensity_formula =
      propensity_misspecified(scenario.misspec) ? linear_propensity_formula() : correct_propensity_formula();
  setup.outcome_formula =
      outcome_misspecified(scenario.misspec) ? no_interaction_outcome_formula() : correct_outcome_formula();
  if (scenario.sample_proportion == 1.0) {
    const auto rows = all_rows(setup.dataset.network.num_outcomes());
    setup.propensity = fit_propensity_stage(setup.dataset, setup.propensity_formula, scenario.truncation, rows);
  }
  return setup;
}

namespace {

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx = all_rows(n);
  for (std::size_t t = 0; t < k; ++t) std::swap(idx[t], idx[t + rng.index(n - t)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

const std::array<EffectSpec, 12>& simulation_specs() {
  static const std::array<EffectSpec, 12> specs = [] {
    std::array<EffectSpec, 12> s{};
    std::size_t k = 0;
    for (EffectKind kind : {EffectKind::direct, EffectKind::spillover}) {
      for (int held : {0, 1}) {
        for (Method m : {Method::gcomp, Method::aipw, Method::saipw}) s[k++] = {m, kind, held};
      }
    }
    return s;
  }();
  return specs;
}

}  // namespace

ScenarioResult run_scenario(const SimScenario& scenario) {
  if (scenario.xi == 0.0) throw ParameterError("bias is normalized by xi; run_scenario needs xi != 0");
  const ScenarioSetup setup = prepare_scenario(scenario);
  const AnalysisDataset& data = setup.dataset;
  const std::size_t n = data.network.num_outcomes();

  ScenarioResult result;
  result.scenario = scenario;
  result.scenario.population.reset();
  result.outcome_units = n;
  result.intervention_units = data.network.num_interventions();
  result.treated_fraction =
      static_cast<double>(std::accumulate(setup.treatments.treatment.begin(), setup.treatments.treatment.end(), 0)) /
      static_cast<double>(setup.treatments.treatment.size());
  result.cells = cell_counts(data.assignment);
  result.group_sizes = setup.planted.group_sizes();

  const std::size_t sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(scenario.sample_proportion * static_cast<double>(n))));

  const auto R = static_cast<std::size_t>(scenario.replications);
  std::vector<std::vector<AbRow>> per_rep(R);
  std::vector<std::vector<ReplicateFailure>> per_rep_fail(R);
  parallel_for(R, scenario.threads, [&](std::size_t r) {
    auto& out = per_rep[r];
    auto& fail = per_rep_fail[r];
    const int rep = static_cast<int>(r);
    try {
      Rng outcome_rng(derive_seed(scenario.seed, {stream::outcomes, r}));
      const PotentialOutcomes po =
          generate_outcomes(data.outcomes, data.assignment, setup.planted, scenario.sigma2, outcome_rng);
      std::vector<std::size_t> rows;
      CellTable psi;
      if (setup.propensity) {
        rows = all_rows(n);
        psi = setup.propensity->bundle.psi;
      } else {
        Rng sample_rng(derive_seed(scenario.seed, {stream::sampling, r}));
        rows = sample_without_replacement(sample_rng, n, sample_size);
        psi = fit_propensity_stage(data, setup.propensity_formula, scenario.truncation, rows).bundle.psi;
      }
      const OutcomePredictions mu = fit_outcome_stage(data, setup.outcome_formula, rows, po.y);
      const EstimationInputs inputs = gather_inputs(data, rows, po.y, psi, mu.mu_hat);

      for (PlantedGroup g : {PlantedGroup::low, PlantedGroup::mid, PlantedGroup::high}) {
        Subgroup s;
        s.name = to_string(g);
        for (std::size_t k = 0; k < rows.size(); ++k) {
          if (setup.planted.group[rows[k]] == g) s.members.push_back(k);
        }
        const double truth = PlantedEffects::effect_of(g, scenario.xi);
        for (const auto& spec : simulation_specs()) {
          try {
            const double est = effect(inputs, spec, s).estimate;
            out.push_back({scenario.label, rep, g, spec, est, truth,
                           percent_absolute_bias(est, truth, scenario.xi)});
          } catch (const NumericalError& e) {
            fail.push_back({rep, s.name + " " + spec.estimand_label() + " " + to_string(spec.method) + ": " + e.what()});
          }
        }
      }
    } catch (const NumericalError& e) {
      fail.push_back({rep, e.what()});
    }
  });
  for (std::size_t r = 0; r < R; ++r) {
    result.rows.insert(result.rows.end(), per_rep[r].begin(), per_rep[r].end());
    result.failures.insert(result.failures.end(), per_rep_fail[r].begin(), per_rep_fail[r].end());
  }
  return result;
}

DiscoveryReport discovery_replicate(const ScenarioSetup& setup, const SimScenario& scenario, int replicate,
                                    const EffectSpec& spec, std::vector<std::string> covariates) {
  const AnalysisDataset& data = setup.dataset;
  const std::size_t n = data.network.num_outcomes();
  const auto rows = all_rows(n);
  Rng rng(derive_seed(scenario.seed, {stream::outcomes, static_cast<std::uint64_t>(replicate)}));
  const PotentialOutcomes po = generate_outcomes(data.outcomes, data.assignment, setup.planted, scenario.sigma2, rng);
  const CellTable psi = setup.propensity
                            ? setup.propensity->bundle.psi
                            : fit_propensity_stage(data, setup.propensity_formula, scenario.truncation, rows).bundle.psi;
  const OutcomePredictions mu = fit_outcome_stage(data, no_interaction_outcome_formula(), rows, po.y);
  const EstimationInputs inputs = gather_inputs(data, rows, po.y, psi, mu.mu_hat);
  if (covariates.empty()) {
    covariates = data.outcomes.columns;
    covariates.push_back(std::string("key_") + simcol::log_op_time);
  }
  const BinarizedCovariates design = binarize_at_median(data.outcome_columns, covariates);
  DiscoveryReport report = discover(iate(inputs, spec), design);
  report.estimand = spec.estimand_label();
  report.method = to_string(spec.method);
  return report;
}

std::vector<SimScenario> study_scenarios(Study study, const SimScenario& base) {
  std::vector<SimScenario> out;
  const auto add = [&](SimScenario s, std::string label) {
    s.label = std::move(label);
    out.push_back(std::move(s));
  };
  switch (study) {
    case Study::misspecification:
      for (auto m : {Misspecification::A, Misspecification::B, Misspecification::C, Misspecification::D}) {
        SimScenario s = base;
        s.misspec = m;
        add(s, to_string(m));
      }
      break;
    case Study::sample_proportion:
      for (double p : {0.5, 0.2, 0.1, 0.05, 0.03, 0.01, 0.005}) {
        SimScenario s = base;
        s.misspec = Misspecification::A;
        s.sample_proportion = p;
        add(s, "p=" + format_double(p));
      }
      break;
    case Study::error_variance:
      for (double v : {0.2, 1.0, 5.0, 10.0}) {
        SimScenario s = base;
        s.misspec = Misspecification::A;
        s.sigma2 = v;
        s.xi = 1.0;
        add(s, "sigma2=" + format_double(v));
      }
      break;
    case Study::pate:
      for (double x : {1.0, 5.0, 10.0}) {
        SimScenario s = base;
        s.misspec = Misspecification::A;
        s.xi = x;
        s.sigma2 = 1.0;
        add(s, "xi=" + format_double(x));
      }
      break;
  }
  return out;
}

double median_ab(const std::vector<AbRow>& rows, EffectKind kind, Method method) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.spec.kind == kind && r.spec.method == method) v.push_back(r.ab);
  }
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return quantile(v, 0.5);
}

std::vector<SummaryRow> summarize(const std::vector<AbRow>& rows) {
  // Keep first-appearance order of scenarios.
  std::vector<std::string> scenarios;
  std::map<std::tuple<std::string, int, int>, std::vector<double>> groups;
  for (const auto& r : rows) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
      scenarios.push_back(r.scenario);
    }
    groups[{r.scenario, static_cast<int>(r.spec.kind), static_cast<int>(r.spec.method)}].push_back(r.ab);
  }
  std::vector<SummaryRow> out;
  for (const auto& sc : scenarios) {
    for (EffectKind kind : {EffectKind::direct, EffectKind::spillover}) {
      for (Method m : {Method::gcomp, Method::aipw, Method::saipw}) {
        auto it = groups.find({sc, static_cast<int>(kind), static_cast<int>(m)});
        if (it == groups.end()) continue;
        const auto& v = it->second;
        out.push_back({sc, kind, m, v.size(), quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)});
      }
    }
  }
  return out;
}

void write_ab_csv(std::ostream& out, const std::vector<AbRow>& rows) {
  CsvWriter w(out);
  w.row({"scenario", "replicate", "subgroup", "estimand", "method", "ab"});
  for (const auto& r : rows) {
    w.field(r.scenario).field(r.replicate).field(to_string(r.subgroup)).field(r.spec.estimand_label());
    w.field(to_string(r.spec.method)).field(r.ab);
    w.end_row();
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  CsvWriter w(out);
  w.row({"scenario", "effect", "method", "count", "median", "q25", "q75"});
  for (const auto& r : rows) {
    w.field(r.scenario).field(to_string(r.kind)).field(to_string(r.method)).field(r.count);
    w.field(r.median).field(r.q25).field(r.q75);
    w.end_row();
  }
}

}  // namespace bni
