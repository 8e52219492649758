#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "bni/analysis.hpp"
#include "bni/bipartite.hpp"
#include "bni/bootstrap.hpp"
#include "bni/csv.hpp"
#include "bni/discovery.hpp"
#include "bni/effects.hpp"
#include "bni/error.hpp"
#include "bni/simgen.hpp"
#include "bni/svg.hpp"

namespace bni::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& config) {
  fs::path dir = config.required("out_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

unsigned thread_count(const RunConfig& config) {
  const long long t = config.integer("threads");
  if (t < 1) throw ParameterError("threads must be at least 1");
  return static_cast<unsigned>(t);
}

TruncationQuantiles quantiles_of(const RunConfig& config, const std::string& key) {
  const auto r = config.range(key);
  if (!r) return TruncationQuantiles::identity();
  if (!(r->first >= 0.0 && r->first < r->second && r->second <= 1.0)) {
    throw ParameterError(key + " needs 0 <= lower < upper <= 1");
  }
  return {r->first, r->second};
}

TruncationConfig truncation_of(const RunConfig& config) {
  return {quantiles_of(config, "truncate"), quantiles_of(config, "truncate_joint")};
}

AnalysisDataset load_dataset(const RunConfig& config) {
  BipartiteNetwork net = derive_exposure_structure(read_network_csv(config.required("network")));
  const UnitTable interventions = read_unit_table(config.required("interventions"), UnitSide::intervention);
  const UnitTable outcomes = read_unit_table(config.required("outcomes"), UnitSide::outcome);
  AnalysisDataset data = assemble_dataset(std::move(net), interventions, outcomes);
  const double q = config.number("filter_quantile");
  if (q > 0.0) data = filter_dataset(data, q);
  return data;
}

std::vector<EffectSpec> effect_specs(const RunConfig& config) {
  std::vector<EffectSpec> out;
  const auto methods = config.list("methods");
  const auto estimands = config.list("estimands");
  if (methods.empty() || estimands.empty()) throw ConfigError("methods and estimands must be non-empty");
  for (const auto& e : estimands) {
    EffectSpec spec;
    if (e == "tau(0)" || e == "tau(1)") {
      spec.kind = EffectKind::direct;
    } else if (e == "delta(0)" || e == "delta(1)") {
      spec.kind = EffectKind::spillover;
    } else {
      throw ConfigError("unknown estimand '" + e + "' (expected tau(0), tau(1), delta(0) or delta(1))");
    }
    spec.held = e[e.size() - 2] - '0';
    for (const auto& m : methods) {
      spec.method = parse_method(m);
      out.push_back(spec);
    }
  }
  return out;
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

void write_run_config(const fs::path& dir, const RunConfig& config) {
  auto out = open_output(dir / "run_config.txt");
  config.print(out);
}

}  // namespace

void cmd_derive(const RunConfig& config, std::ostream& log) {
  const BipartiteNetwork net = derive_exposure_structure(read_network_csv(config.required("network")));
  const UnitTable interventions =
      align_table(read_unit_table(config.required("interventions"), UnitSide::intervention), net.intervention_ids());
  if (!config.empty("outcomes")) {
    align_table(read_unit_table(config.text("outcomes"), UnitSide::outcome), net.outcome_ids());
  }
  if (!interventions.treatment) throw MappingError("intervention table has no 'treatment' column");
  const ExposureAssignment a = map_treatments(net, *interventions.treatment);

  const fs::path dir = output_dir(config);
  auto out = open_output(dir / "exposure.csv");
  CsvWriter w(out);
  w.row({"outcome_id", "key_id", "upwind_id", "Z", "G"});
  for (std::size_t i = 0; i < net.num_outcomes(); ++i) {
    w.field(net.outcome_ids()[i]).field(net.intervention_ids()[net.key_of(i)]);
    w.field(net.intervention_ids()[net.upwind_of(i)[0]]).field(a.z[i]).field(a.g[i]);
    w.end_row();
  }
  const CellCounts c = cell_counts(a);
  log << "derived " << net.num_outcomes() << " outcome units over " << net.num_interventions()
      << " intervention units; cells (1,1) " << c[1][1] << ", (1,0) " << c[1][0] << ", (0,1) " << c[0][1]
      << ", (0,0) " << c[0][0] << '\n';
  write_run_config(dir, config);
}

void cmd_estimate(const RunConfig& config, std::ostream& log) {
  const long long B = config.integer("bootstrap");
  if (B < 0) throw ParameterError("bootstrap must be >= 0");
  if (B > 0 && !config.seed) throw ConfigError("--seed is required when bootstrapping");
  const AnalysisDataset data = load_dataset(config);

  EstimatorConfig est;
  est.propensity_formula = Formula::parse(config.required("propensity_formula"));
  est.outcome_formula = Formula::parse(config.required("outcome_formula"));
  est.truncation = truncation_of(config);
  est.effects = effect_specs(config);
  for (const auto& item : config.list("subgroups")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) {
      throw ConfigError("subgroup '" + item + "' must be written name:expression");
    }
    est.subgroups.push_back(parse_subgroup(data, item.substr(0, colon), item.substr(colon + 1)));
  }

  const AnalysisResult result = run_analysis(data, est);
  std::vector<EffectEstimate> estimates = result.estimates;
  const fs::path dir = output_dir(config);
  if (B > 0) {
    BootstrapOptions opt;
    opt.replicates = static_cast<int>(B);
    opt.seed = *config.seed;
    opt.level = config.number("level");
    opt.full_data_truncation_bounds = config.boolean("full_data_bounds");
    opt.threads = thread_count(config);
    const BootstrapRun run = bootstrap_effects(data, est, opt);
    estimates = run.estimates;
    auto out = open_output(dir / "replicates.csv");
    write_replicates_csv(out, run);
    int redraws = 0;
    for (int r : run.redraws) redraws += r;
    log << "bootstrap: " << B << " replicates, " << redraws << " redraws\n";
  }
  {
    auto out = open_output(dir / "estimates.csv");
    write_estimates_csv(out, estimates);
  }
  {
    auto out = open_output(dir / "propensity.csv");
    write_propensity_csv(out, data.network.outcome_ids(), result.propensity.bundle.psi);
  }
  write_run_config(dir, config);
  for (const auto& e : estimates) {
    log << e.spec.estimand_label() << ' ' << to_string(e.spec.method) << ' ' << e.subgroup << " (n=" << e.n_x
        << "): " << format_double(e.estimate) << '\n';
  }
}

void cmd_simulate(const RunConfig& config, std::ostream& log) {
  if (!config.seed) throw ConfigError("--seed is required for simulate");
  SimScenario base;
  base.seed = *config.seed;
  base.replications = static_cast<int>(config.integer("replications"));
  base.network.interventions = static_cast<std::size_t>(std::max(0LL, config.integer("synthetic_interventions")));
  base.network.outcomes = static_cast<std::size_t>(std::max(0LL, config.integer("synthetic_outcomes")));
  base.network.decay = config.number("decay");
  base.network.weight_noise_sd = config.number("weight_noise");
  base.filter_low_influence = config.boolean("filter");
  base.filter_quantile = config.number("filter_quantile");
  base.truncation = truncation_of(config);
  base.threads = thread_count(config);
  if (!config.empty("network")) {
    auto pop = std::make_shared<Population>();
    pop->network = read_network_csv(config.text("network"));
    pop->interventions = read_unit_table(config.required("interventions"), UnitSide::intervention);
    pop->outcomes = read_unit_table(config.required("outcomes"), UnitSide::outcome);
    base.population = std::move(pop);
  }

  std::vector<SimScenario> scenarios;
  if (!config.empty("study")) {
    const std::string& s = config.text("study");
    Study study;
    if (s == "misspecification") study = Study::misspecification;
    else if (s == "sample_proportion") study = Study::sample_proportion;
    else if (s == "error_variance") study = Study::error_variance;
    else if (s == "pate") study = Study::pate;
    else throw ConfigError("unknown study '" + s + "'");
    scenarios = study_scenarios(study, base);
  } else {
    const auto letters = config.list("scenarios");
    const auto props = config.numbers("sample_proportions");
    const auto sigmas = config.numbers("sigma2");
    const auto xis = config.numbers("xi");
    if (letters.empty()) throw ConfigError("scenarios must be non-empty");
    for (const auto& l : letters) {
      for (double p : props) {
        for (double v : sigmas) {
          for (double x : xis) {
            SimScenario s = base;
            s.misspec = parse_misspecification(l);
            s.sample_proportion = p;
            s.sigma2 = v;
            s.xi = x;
            s.label = l;
            if (props.size() > 1) s.label += "_p" + format_double(p);
            if (sigmas.size() > 1) s.label += "_s" + format_double(v);
            if (xis.size() > 1) s.label += "_x" + format_double(x);
            scenarios.push_back(std::move(s));
          }
        }
      }
    }
  }

  const fs::path dir = output_dir(config);
  std::vector<AbRow> all;
  for (const auto& s : scenarios) {
    const ScenarioResult r = run_scenario(s);
    {
      auto out = open_output(dir / ("ab_" + file_label(s.label) + ".csv"));
      write_ab_csv(out, r.rows);
    }
    log << "scenario " << s.label << ": " << r.outcome_units << " outcome units, " << r.intervention_units
        << " intervention units, treated fraction " << format_double(r.treated_fraction) << ", "
        << r.failures.size() << " failed estimates\n";
    for (const auto& f : r.failures) log << "  replicate " << f.replicate << ": " << f.what << '\n';
    all.insert(all.end(), r.rows.begin(), r.rows.end());
  }
  {
    auto out = open_output(dir / "summary.csv");
    write_summary_csv(out, summarize(all));
  }
  if (config.boolean("plots")) {
    for (EffectKind k : {EffectKind::direct, EffectKind::spillover}) {
      auto out = open_output(dir / ("boxplot_" + to_string(k) + ".svg"));
      write_ab_boxplot_svg(out, all, k, "Percent absolute bias, " + to_string(k) + " effects");
    }
  }
  write_run_config(dir, config);
}

void cmd_discover(const RunConfig& config, std::ostream& log) {
  const AnalysisDataset data = load_dataset(config);
  if (!data.outcomes.outcome) throw MappingError("outcome table has no 'outcome' column");
  const Eigen::VectorXd& y = *data.outcomes.outcome;
  const double trim = config.number("trim");
  const auto rows = trim_outcome_rows(y, trim);

  EffectSpec spec;
  spec.method = parse_method(config.text("method"));
  spec.kind = parse_effect_kind(config.text("estimand") == "tau"     ? "direct"
                                : config.text("estimand") == "delta" ? "spillover"
                                                                     : config.text("estimand"));
  const long long held = config.integer("held");
  if (held != 0 && held != 1) throw ParameterError("held must be 0 or 1");
  spec.held = static_cast<int>(held);

  const Formula pf = Formula::parse(config.required("propensity_formula"));
  const Formula of = Formula::parse(config.required("outcome_formula"));
  const PropensityStage ps = fit_propensity_stage(data, pf, truncation_of(config), rows);
  const OutcomePredictions mu = fit_outcome_stage(data, of, rows, y);
  const EstimationInputs inputs = gather_inputs(data, rows, y, ps.bundle.psi, mu.mu_hat);
  const Eigen::VectorXd iates = iate(inputs, spec);

  std::vector<std::string> cols = config.list("covariates");
  if (cols.empty()) cols = data.outcomes.columns;
  const BinarizedCovariates design = binarize_at_median(data.outcome_columns.subset(rows), cols);
  DiscoveryReport report = discover(iates, design, config.number("tuning"));
  report.estimand = spec.estimand_label();
  report.method = to_string(spec.method);

  const fs::path dir = output_dir(config);
  {
    auto out = open_output(dir / "discovery.csv");
    write_discovery_csv(out, report);
  }
  if (config.boolean("plots")) {
    auto out = open_output(dir / "forest.svg");
    write_forest_svg(out, report);
  }
  write_run_config(dir, config);
  log << report.method << ' ' << report.estimand << " IATEs on " << rows.size() << " outcome units, mean "
      << format_double(report.average_effect) << '\n';
  for (const auto& r : report.rows) {
    log << "  " << r.covariate << ": " << format_double(r.coefficient) << " [" << format_double(r.ci_lower) << ", "
        << format_double(r.ci_upper) << "]" << (r.significant ? " *" : "") << '\n';
  }
}

void run_command(const RunConfig& config, std::ostream& log) {
  switch (config.command) {
    case Command::derive: return cmd_derive(config, log);
    case Command::estimate: return cmd_estimate(config, log);
    case Command::simulate: return cmd_simulate(config, log);
    case Command::discover: return cmd_discover(config, log);
  }
}

}  // namespace bni::cli
