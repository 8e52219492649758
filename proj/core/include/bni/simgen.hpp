#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bni/analysis.hpp"
#include "bni/bipartite.hpp"
#include "bni/cells.hpp"
#include "bni/discovery.hpp"
#include "bni/effects.hpp"
#include "bni/formula.hpp"
#include "bni/propensity.hpp"
#include "bni/random.hpp"

namespace bni {

// Column names used by the treatment and outcome generating models.
namespace simcol {
inline constexpr const char* log_pop = "LogPop";
inline constexpr const char* smoke_rate = "SmokeRate";
inline constexpr const char* pct_high_school = "PctHighSchool";
inline constexpr const char* pct_urban = "PctUrban";
inline constexpr const char* pct_poor = "PctPoor";
inline constexpr const char* pct_nonwhite = "PctNonwhite";
inline constexpr const char* log_op_time = "LogOpTime";
inline constexpr const char* key_log_pop = "KeyLogPop";
inline constexpr const char* key_pct_urban = "KeyPctUrban";
inline constexpr const char* group_mid = "sg_mid";
inline constexpr const char* group_high = "sg_high";
}  // namespace simcol

// Both sides of a bipartite population: network (not yet derived) and the
// two covariate tables. Interventions carry LogOpTime; outcomes carry the six
// outcome-level covariates.
struct Population {
  BipartiteNetwork network;
  UnitTable interventions;
  UnitTable outcomes;
};

struct SyntheticNetworkOptions {
  std::size_t interventions = 40;
  std::size_t outcomes = 3000;
  // h_ji = exp(-decay * distance) * exp(weight_noise_sd * N(0,1)).
  double decay = 5.0;
  double weight_noise_sd = 0.5;
};

// Units uniform on the unit square, complete bipartite influence weights, and
// spatially smooth covariates (see README for distributions).
Population generate_synthetic_network(const SyntheticNetworkOptions& options, std::uint64_t seed);

struct TreatmentDraw {
  std::vector<int> treatment;
  Eigen::VectorXd probability;
};

// logit p_j = 0.1 KeyLogPop - 1.5 KeyLogPop*KeyPctUrban + 0.05 LogOpTime^2,
// T_j ~ Bernoulli(p_j). `columns` must provide the three named columns.
TreatmentDraw generate_treatments(const NamedColumns& columns, Rng& rng);
Eigen::VectorXd true_treatment_probability(const NamedColumns& columns);

enum class PlantedGroup : int { low = 0, mid = 1, high = 2 };
std::string to_string(PlantedGroup g);

struct PlantedEffects {
  Eigen::VectorXd tau;
  Eigen::VectorXd delta;
  std::vector<PlantedGroup> group;
  double nonwhite_cut = 0.0;  // nearest-rank 33rd percentile
  double poor_cut = 0.0;      // nearest-rank median
  double xi = 0.0;

  static double effect_of(PlantedGroup g, double xi) { return xi * static_cast<int>(g); }
  std::array<std::size_t, 3> group_sizes() const;
};

// low: PctNonwhite <= 33rd percentile (effect 0); mid: above it with PctPoor
// <= median (xi); high: above it with PctPoor > median (2 xi).
PlantedEffects plant_heterogeneity(const UnitTable& outcomes, double xi);

struct PotentialOutcomes {
  CellTable table;  // Y_i(z,g)
  Eigen::VectorXd y;  // observed Y_i(Z_i, G_i)
};

Eigen::VectorXd baseline_mean(const UnitTable& outcomes);

// Y_i(z,g) = mu_i(z,g) + e_i with one e_i ~ N(0, sigma2) shared across cells.
PotentialOutcomes generate_outcomes(const UnitTable& outcomes, const ExposureAssignment& assignment,
                                    const PlantedEffects& planted, double sigma2, Rng& rng);

enum class Misspecification { A, B, C, D };
std::string to_string(Misspecification m);
Misspecification parse_misspecification(std::string_view text);
bool propensity_misspecified(Misspecification m);
bool outcome_misspecified(Misspecification m);

Formula correct_propensity_formula();
Formula linear_propensity_formula();
Formula correct_outcome_formula();
Formula no_interaction_outcome_formula();

struct SimScenario {
  std::string label;
  Misspecification misspec = Misspecification::A;
  double sample_proportion = 1.0;
  double sigma2 = 1.0;
  double xi = 1.0;
  int replications = 1000;
  std::uint64_t seed = 0;
  SyntheticNetworkOptions network;
  // When set, used instead of a synthetic network.
  std::shared_ptr<const Population> population;
  bool filter_low_influence = true;
  double filter_quantile = 0.25;
  // Component scores truncated at 5%/95%; joint cells left as products.
  TruncationConfig truncation{{0.05, 0.95}, TruncationQuantiles::identity()};
  unsigned threads = 1;

  void validate() const;
};

struct AbRow {
  std::string scenario;
  int replicate = 0;
  PlantedGroup subgroup = PlantedGroup::low;
  EffectSpec spec;
  double estimate = 0.0;
  double truth = 0.0;
  double ab = 0.0;
};

struct ReplicateFailure {
  int replicate = 0;
  std::string what;
};

struct ScenarioResult {
  SimScenario scenario;
  std::size_t outcome_units = 0;
  std::size_t intervention_units = 0;
  double treated_fraction = 0.0;
  CellCounts cells{};
  std::array<std::size_t, 3> group_sizes{};
  std::vector<AbRow> rows;
  std::vector<ReplicateFailure> failures;
};

// Prepared state that stays fixed across Monte Carlo iterations: network,
// covariates, treatments, planted effects and (for sample proportion 1) the
// joint propensities.
struct ScenarioSetup {
  AnalysisDataset dataset;
  PlantedEffects planted;
  TreatmentDraw treatments;
  Formula propensity_formula;
  Formula outcome_formula;
  std::optional<PropensityStage> propensity;
};

ScenarioSetup prepare_scenario(const SimScenario& scenario);

ScenarioResult run_scenario(const SimScenario& scenario);

// One discovery replicate on a prepared scenario: fresh outcomes from
// replicate stream r, outcome model without subgroup terms (the subgroups
// are treated as unknown), IATEs for `spec`, and the robust regression on
// median-binarized covariates (default: the six outcome covariates plus
// key_LogOpTime). Uses the scenario's fixed propensities when present.
DiscoveryReport discovery_replicate(const ScenarioSetup& setup, const SimScenario& scenario, int replicate,
                                    const EffectSpec& spec, std::vector<std::string> covariates = {});

enum class Study { misspecification, sample_proportion, error_variance, pate };
// Scenario lists used by the four simulation studies, derived from `base`.
std::vector<SimScenario> study_scenarios(Study study, const SimScenario& base);

struct SummaryRow {
  std::string scenario;
  EffectKind kind = EffectKind::direct;
  Method method = Method::aipw;
  std::size_t count = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Median and IQR of AB per (scenario, effect kind, method), pooled over
// subgroups and held levels.
std::vector<SummaryRow> summarize(const std::vector<AbRow>& rows);
double median_ab(const std::vector<AbRow>& rows, EffectKind kind, Method method);

// CSV `scenario,replicate,subgroup,estimand,method,ab`.
void write_ab_csv(std::ostream& out, const std::vector<AbRow>& rows);
// CSV `scenario,effect,method,count,median,q25,q75`.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace bni
