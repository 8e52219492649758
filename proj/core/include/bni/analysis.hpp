#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bni/bipartite.hpp"
#include "bni/effects.hpp"
#include "bni/formula.hpp"
#include "bni/propensity.hpp"

namespace bni {

// A derived network with both unit tables aligned to its index order, the
// frozen intervention-level design columns (own covariates plus Key*/Upwind*
// outcome-covariate summaries, empty groups imputed), the outcome-level
// columns (own covariates plus key_<col> for the key unit's covariates), and
// the mapped exposures.
struct AnalysisDataset {
  BipartiteNetwork network;
  UnitTable interventions;
  UnitTable outcomes;
  NamedColumns intervention_columns;
  NamedColumns outcome_columns;
  ExposureAssignment assignment;
  std::vector<std::string> summary_columns;  // names of the Key*/Upwind* columns
};

// `network` must be derived. Tables are aligned by id; interventions need a
// treatment column. The outcome column may be absent (e.g. for simulation,
// where outcomes are supplied per replication).
AnalysisDataset assemble_dataset(BipartiteNetwork network, const UnitTable& interventions,
                                 const UnitTable& outcomes);

// Applies filter_low_influence and re-assembles (summaries recomputed on
// the retained outcome units).
AnalysisDataset filter_dataset(const AnalysisDataset& dataset, double q);

// Outcome rows whose observed outcome lies within the [q, 1-q] nearest-rank
// quantile range. q = 0 keeps every row.
std::vector<std::size_t> trim_outcome_rows(const Eigen::VectorXd& y, double q);

// Named membership mask over the dataset's outcome units.
struct SubgroupDefinition {
  std::string name;
  std::vector<char> mask;

  // Members among `rows` (positions into rows).
  Subgroup restrict_to(std::span<const std::size_t> rows) const;
};

// Conjunction of comparisons `col<op>value` joined by `&`, op in
// {<, <=, >, >=, ==, !=}, evaluated on outcome_columns.
SubgroupDefinition parse_subgroup(const AnalysisDataset& dataset, std::string_view name,
                                  std::string_view expression);

struct EstimatorConfig {
  Formula propensity_formula;
  Formula outcome_formula;
  TruncationConfig truncation;
  std::vector<EffectSpec> effects;
  std::vector<SubgroupDefinition> subgroups;
  IrlsOptions irls;
};

// Intervention units serving as key or upwind unit for any listed row,
// ascending.
std::vector<std::size_t> retained_interventions(const BipartiteNetwork& network,
                                                std::span<const std::size_t> rows);

struct PropensityStage {
  InterventionPropensity fit;
  PropensityBundle bundle;
  std::vector<std::size_t> retained;
};

// Fits the propensity model on the retained intervention units of `rows`,
// predicts phi for all intervention units, and builds psi for `rows`.
PropensityStage fit_propensity_stage(const AnalysisDataset& dataset, const Formula& formula,
                                     const TruncationConfig& truncation, std::span<const std::size_t> rows,
                                     const IrlsOptions& irls = {}, const TruncationBounds* fixed_bounds = nullptr);

OutcomePredictions fit_outcome_stage(const AnalysisDataset& dataset, const Formula& formula,
                                     std::span<const std::size_t> rows, const Eigen::VectorXd& y_full);

EstimationInputs gather_inputs(const AnalysisDataset& dataset, std::span<const std::size_t> rows,
                               const Eigen::VectorXd& y_full, const CellTable& psi, const CellTable& mu_hat);

struct AnalysisResult {
  PropensityStage propensity;
  OutcomePredictions outcome;
  EstimationInputs inputs;
  std::vector<EffectEstimate> estimates;  // population first, then each subgroup
};

// Full pipeline on `rows` (duplicates allowed) using the dataset's observed outcomes.
AnalysisResult run_analysis(const AnalysisDataset& dataset, const EstimatorConfig& config,
                            std::span<const std::size_t> rows, const TruncationBounds* fixed_bounds = nullptr);
AnalysisResult run_analysis(const AnalysisDataset& dataset, const EstimatorConfig& config);

std::vector<std::size_t> all_rows(std::size_t n);

}  // namespace bni
