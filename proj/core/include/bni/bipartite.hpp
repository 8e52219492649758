#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace bni {

struct InfluenceTriplet {
  std::string intervention_id;
  std::string outcome_id;
  double weight = 0.0;
};

struct InfluenceEntry {
  std::size_t intervention = 0;
  std::size_t outcome = 0;
  double weight = 0.0;
};

// Exposure mapping gamma: which ranked non-key units form the upwind set, and
// how their treatments collapse into the binary upwind exposure G.
struct ExposureMapping {
  std::string name;
  // Upwind set = intervention units ranked 2 .. upwind_size + 1 by weight.
  std::size_t upwind_size = 1;
  std::function<int(std::span<const int>)> gamma;

  // Treatment of the second-largest-weight unit.
  static ExposureMapping second_ranked();
};

// Sparse J x n influence matrix with optional derived key/upwind structure.
// Intervention and outcome indices follow first-appearance order in the
// input rows.
class BipartiteNetwork {
 public:
  BipartiteNetwork() = default;

  // Rejects negative or non-finite weights, empty ids, and duplicate pairs.
  static BipartiteNetwork from_triplets(std::span<const InfluenceTriplet> rows);

  std::size_t num_interventions() const { return intervention_ids_.size(); }
  std::size_t num_outcomes() const { return outcome_ids_.size(); }
  const std::vector<std::string>& intervention_ids() const { return intervention_ids_; }
  const std::vector<std::string>& outcome_ids() const { return outcome_ids_; }
  std::optional<std::size_t> intervention_index(std::string_view id) const;
  std::optional<std::size_t> outcome_index(std::string_view id) const;

  std::span<const InfluenceEntry> entries() const { return entries_; }
  // Entry positions incident to outcome unit i, in input order.
  std::span<const std::size_t> incident(std::size_t outcome) const { return incident_[outcome]; }
  std::vector<InfluenceTriplet> to_triplets() const;

  bool derived() const { return derived_; }
  std::size_t key_of(std::size_t outcome) const { return key_of_[outcome]; }
  double key_weight(std::size_t outcome) const { return key_weight_[outcome]; }
  std::span<const std::size_t> upwind_of(std::size_t outcome) const { return upwind_of_[outcome]; }
  const ExposureMapping& mapping() const { return mapping_; }

  // True if intervention j is key for at least one outcome unit.
  std::vector<char> key_role_mask() const;
  std::vector<char> upwind_role_mask() const;

 private:
  friend BipartiteNetwork derive_exposure_structure(BipartiteNetwork network,
                                                    ExposureMapping mapping);

  std::vector<std::string> intervention_ids_;
  std::vector<std::string> outcome_ids_;
  std::unordered_map<std::string, std::size_t> intervention_lookup_;
  std::unordered_map<std::string, std::size_t> outcome_lookup_;
  std::vector<InfluenceEntry> entries_;
  std::vector<std::vector<std::size_t>> incident_;

  bool derived_ = false;
  ExposureMapping mapping_;
  std::vector<std::size_t> key_of_;
  std::vector<double> key_weight_;
  std::vector<std::vector<std::size_t>> upwind_of_;
};

BipartiteNetwork load_network(std::span<const InfluenceTriplet> rows);
// CSV with header `intervention_id,outcome_id,weight`.
BipartiteNetwork read_network_csv(const std::filesystem::path& path);
void write_network_csv(std::ostream& out, const BipartiteNetwork& network);

// Ranks each outcome unit's incident weights (descending; ties to the smaller
// intervention index). Key = rank 1, upwind set = ranks 2..k+1.
// Throws DegenerateError when an outcome unit has fewer than k+1 incident units.
BipartiteNetwork derive_exposure_structure(BipartiteNetwork network,
                                           ExposureMapping mapping = ExposureMapping::second_ranked());

// One side of the bipartite graph: ids, named real covariates, and an
// optional treatment (intervention side) or outcome (outcome side) column.
struct UnitTable {
  std::vector<std::string> ids;
  std::vector<std::string> columns;
  Eigen::MatrixXd covariates;
  std::optional<std::vector<int>> treatment;
  std::optional<Eigen::VectorXd> outcome;

  std::size_t size() const { return ids.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
  Eigen::VectorXd column(std::string_view name) const;
  UnitTable subset(std::span<const std::size_t> rows) const;
  // Unique ids, finite covariates, binary treatment, finite outcome.
  void validate() const;
};

enum class UnitSide { intervention, outcome };

// Reads `id,<covariate...>[,treatment]` (intervention side) or
// `id,<covariate...>[,outcome]` (outcome side).
UnitTable read_unit_table(const std::filesystem::path& path, UnitSide side);

// Reorders table rows to match `ids`; extra table rows are dropped.
// Throws MappingError if an id is absent from the table.
UnitTable align_table(const UnitTable& table, std::span<const std::string> ids);

struct FilterResult {
  BipartiteNetwork network;                  // derived, same mapping
  std::vector<std::size_t> kept_outcomes;       // original outcome indices
  std::vector<std::size_t> kept_interventions;  // original intervention indices
};

// Drops outcome units whose key weight lies strictly below the nearest-rank
// q-quantile of all key weights, then intervention units left with no
// incident outcome units. Requires a derived network and 0 <= q < 1.
FilterResult filter_low_influence(const BipartiteNetwork& network, double q);

enum class Role { key, upwind };

// Per-intervention means of outcome covariates over the outcome units for
// which the intervention unit holds `role`. Units holding the role for no
// outcome unit are flagged in `empty` and carry NaN.
struct CovariateSummary {
  Role role = Role::key;
  std::vector<std::string> columns;  // "Key<name>" or "Upwind<name>"
  Eigen::MatrixXd values;            // J x p
  std::vector<char> empty;
  std::vector<std::size_t> group_size;

  // Replaces flagged rows with the column mean over non-empty rows.
  CovariateSummary imputed() const;
};

CovariateSummary summarize_outcome_covariates(const BipartiteNetwork& network,
                                              const UnitTable& outcome_table, Role role);

struct ExposureAssignment {
  std::vector<int> z;
  std::vector<int> g;

  std::size_t size() const { return z.size(); }
};

// Z_i = T[key_of(i)], G_i = gamma(T[upwind_of(i)]). Throws MappingError when
// T does not cover every intervention unit or holds a non-binary value.
ExposureAssignment map_treatments(const BipartiteNetwork& network, std::span<const int> treatments);

// counts[z][g]
using CellCounts = std::array<std::array<std::size_t, 2>, 2>;
CellCounts cell_counts(const ExposureAssignment& assignment);

}  // namespace bni
