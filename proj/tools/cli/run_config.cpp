#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bni/csv.hpp"
#include "bni/error.hpp"

namespace bni::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

const std::vector<KeySpec> kDataKeys = {
    {"network", "", "influence CSV: intervention_id,outcome_id,weight"},
    {"interventions", "", "intervention-unit CSV: id, treatment, covariates"},
    {"outcomes", "", "outcome-unit CSV: id, outcome, covariates"},
};

const std::vector<KeySpec> kCommonKeys = {
    {"threads", "1", "worker threads"},
    {"out_dir", "out", "output directory"},
};

const std::vector<KeySpec> kModelKeys = {
    {"propensity_formula", "", "intervention-level propensity terms, e.g. KeyLogPop + LogOpTime^2"},
    {"outcome_formula", "", "outcome-model terms; must include Z and G"},
    {"truncate", "0.05,0.95", "component propensity truncation quantiles, or none"},
    {"truncate_joint", "0.05,0.95", "joint propensity truncation quantiles, or none"},
    {"filter_quantile", "0", "drop outcome units whose key weight is below this quantile"},
};

std::vector<KeySpec> join(std::initializer_list<const std::vector<KeySpec>*> parts, std::vector<KeySpec> extra) {
  std::vector<KeySpec> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::derive: return "derive";
    case Command::estimate: return "estimate";
    case Command::simulate: return "simulate";
    case Command::discover: return "discover";
  }
  return "?";
}

const std::vector<KeySpec>& keys_for(Command c) {
  static const std::vector<KeySpec> derive = join({&kCommonKeys, &kDataKeys}, {});
  static const std::vector<KeySpec> estimate = join(
      {&kCommonKeys, &kDataKeys, &kModelKeys},
      {{"methods", "G,AIPW,SAIPW", "estimators"},
       {"estimands", "tau(0),tau(1),delta(0),delta(1)", "effects to estimate"},
       {"subgroups", "", "name:expression list, e.g. poor:PctPoor>0.2&LogPop<=9"},
       {"bootstrap", "0", "bootstrap replicates (0 disables)"},
       {"level", "0.95", "bootstrap CI level"},
       {"full_data_bounds", "false", "reuse full-data truncation bounds in bootstrap replicates"}});
  static const std::vector<KeySpec> simulate = join(
      {&kCommonKeys},
      {{"network", "", "optional influence CSV replacing the synthetic network"},
       {"interventions", "", "intervention-unit CSV with LogOpTime (with network)"},
       {"outcomes", "", "outcome-unit CSV with the six simulation covariates (with network)"},
       {"study", "", "misspecification, sample_proportion, error_variance or pate; overrides the grid"},
       {"scenarios", "A,B,C,D", "misspecification scenarios"},
       {"sample_proportions", "1", "sample proportions"},
       {"sigma2", "1", "outcome error variances"},
       {"xi", "1", "planted effect sizes"},
       {"replications", "1000", "Monte Carlo replications per scenario"},
       {"synthetic_interventions", "40", "synthetic intervention units"},
       {"synthetic_outcomes", "3000", "synthetic outcome units (before filtering)"},
       {"decay", "5", "distance decay of synthetic weights"},
       {"weight_noise", "0.5", "log-normal noise sd of synthetic weights"},
       {"filter", "true", "drop low-influence outcome units"},
       {"filter_quantile", "0.25", "quantile used by the low-influence filter"},
       {"truncate", "0.05,0.95", "component propensity truncation quantiles, or none"},
       {"truncate_joint", "none", "joint propensity truncation quantiles, or none"},
       {"plots", "true", "write SVG boxplots"}});
  static const std::vector<KeySpec> discover = join(
      {&kCommonKeys, &kDataKeys, &kModelKeys},
      {{"method", "AIPW", "estimator used for the IATEs"},
       {"estimand", "tau", "tau (direct) or delta (spillover)"},
       {"held", "0", "held exposure level"},
       {"trim", "0", "two-sided outcome trimming quantile"},
       {"covariates", "", "covariates to binarize (default: the outcome table's covariates)"},
       {"tuning", "1.345", "Huber tuning constant"},
       {"plots", "true", "write a forest-plot SVG"}});
  switch (c) {
    case Command::derive: return derive;
    case Command::estimate: return estimate;
    case Command::simulate: return simulate;
    case Command::discover: return discover;
  }
  return derive;
}

KeyValues parse_config_text(std::string_view text, const std::string& source) {
  KeyValues out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected `key = value`");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (out.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

RunConfig RunConfig::resolve(Command command, const KeyValues& file, const KeyValues& flags,
                             std::optional<unsigned long long> seed) {
  RunConfig rc;
  rc.command = command;
  rc.seed = seed;
  const auto& keys = keys_for(command);
  for (const auto& k : keys) rc.values_[k.name] = k.default_value;
  const auto apply = [&](const KeyValues& kv, const char* where) {
    for (const auto& [key, value] : kv) {
      if (key == "seed") throw ConfigError("seed is only accepted as the --seed flag");
      if (!rc.values_.count(key)) {
        throw ConfigError(std::string("unknown ") + where + " key '" + key + "' for " + to_string(command));
      }
      rc.values_[key] = value;
    }
  };
  apply(file, "config");
  apply(flags, "flag");
  return rc;
}

const std::string& RunConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("internal: key '" + key + "' not defined for " + to_string(command));
  return it->second;
}

const std::string& RunConfig::required(const std::string& key) const {
  const std::string& v = text(key);
  if (v.empty()) throw ConfigError("missing required setting '" + key + "'");
  return v;
}

double RunConfig::number(const std::string& key) const {
  auto v = parse_double(text(key));
  if (!v) throw ConfigError("setting '" + key + "' is not a number: '" + text(key) + "'");
  return *v;
}

long long RunConfig::integer(const std::string& key) const {
  const std::string& s = text(key);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("setting '" + key + "' is not an integer: '" + s + "'");
  return v;
}

bool RunConfig::boolean(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("setting '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  const std::string& s = text(key);
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    std::string item = trim(std::string_view(s).substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) {
    auto v = parse_double(item);
    if (!v) throw ConfigError("setting '" + key + "' has a non-numeric entry '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ConfigError("setting '" + key + "' needs at least one value");
  return out;
}

std::optional<std::pair<double, double>> RunConfig::range(const std::string& key) const {
  if (text(key) == "none") return std::nullopt;
  const auto v = numbers(key);
  if (v.size() != 2) throw ConfigError("setting '" + key + "' needs two values, lower,upper");
  return std::pair{v[0], v[1]};
}

void RunConfig::print(std::ostream& out) const {
  out << "command = " << to_string(command) << '\n';
  out << "seed = " << (seed ? std::to_string(*seed) : std::string()) << '\n';
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

}  // namespace bni::cli
