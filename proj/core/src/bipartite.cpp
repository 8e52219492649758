#include "bni/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "bni/csv.hpp"
#include "bni/error.hpp"
#include "bni/regression.hpp"

namespace bni {

namespace {

std::uint64_t pair_key(std::size_t j, std::size_t i) {
  return (static_cast<std::uint64_t>(j) << 32) ^ static_cast<std::uint64_t>(i);
}

}  // namespace

ExposureMapping ExposureMapping::second_ranked() {
  return ExposureMapping{"second_ranked", 1,
                         [](std::span<const int> t) { return t.front(); }};
}

BipartiteNetwork BipartiteNetwork::from_triplets(std::span<const InfluenceTriplet> rows) {
  BipartiteNetwork net;
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(rows.size());
  net.entries_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.intervention_id.empty() || row.outcome_id.empty()) {
      throw FormatError("network row " + std::to_string(r + 1) + ": empty id");
    }
    if (!std::isfinite(row.weight) || row.weight < 0.0) {
      throw FormatError("network row " + std::to_string(r + 1) + ": weight must be a finite " +
                        "nonnegative real");
    }
    auto [jt, jnew] = net.intervention_lookup_.try_emplace(row.intervention_id,
                                                           net.intervention_ids_.size());
    if (jnew) net.intervention_ids_.push_back(row.intervention_id);
    auto [it, inew] = net.outcome_lookup_.try_emplace(row.outcome_id, net.outcome_ids_.size());
    if (inew) {
      net.outcome_ids_.push_back(row.outcome_id);
      net.incident_.emplace_back();
    }
    const std::size_t j = jt->second;
    const std::size_t i = it->second;
    if (!seen.insert(pair_key(j, i)).second) {
      throw DuplicateError("network row " + std::to_string(r + 1) + ": duplicate pair (" +
                           row.intervention_id + ", " + row.outcome_id + ")");
    }
    net.incident_[i].push_back(net.entries_.size());
    net.entries_.push_back({j, i, row.weight});
  }
  return net;
}

std::optional<std::size_t> BipartiteNetwork::intervention_index(std::string_view id) const {
  auto it = intervention_lookup_.find(std::string(id));
  if (it == intervention_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> BipartiteNetwork::outcome_index(std::string_view id) const {
  auto it = outcome_lookup_.find(std::string(id));
  if (it == outcome_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<InfluenceTriplet> BipartiteNetwork::to_triplets() const {
  std::vector<InfluenceTriplet> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    out.push_back({intervention_ids_[e.intervention], outcome_ids_[e.outcome], e.weight});
  }
  return out;
}

std::vector<char> BipartiteNetwork::key_role_mask() const {
  std::vector<char> mask(num_interventions(), 0);
  for (std::size_t i = 0; i < key_of_.size(); ++i) mask[key_of_[i]] = 1;
  return mask;
}

std::vector<char> BipartiteNetwork::upwind_role_mask() const {
  std::vector<char> mask(num_interventions(), 0);
  for (const auto& set : upwind_of_) {
    for (std::size_t j : set) mask[j] = 1;
  }
  return mask;
}

BipartiteNetwork load_network(std::span<const InfluenceTriplet> rows) {
  return BipartiteNetwork::from_triplets(rows);
}

BipartiteNetwork read_network_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  const std::size_t cj = csv.require_column("intervention_id");
  const std::size_t ci = csv.require_column("outcome_id");
  const std::size_t cw = csv.require_column("weight");
  std::vector<InfluenceTriplet> rows;
  rows.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    const auto w = parse_double(cells[cw]);
    if (!w) {
      throw FormatError(path.string() + ": row " + std::to_string(r + 2) +
                        ": column 'weight' is not a finite real: '" + cells[cw] + "'");
    }
    rows.push_back({cells[cj], cells[ci], *w});
  }
  try {
    return BipartiteNetwork::from_triplets(rows);
  } catch (const InputError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_network_csv(std::ostream& out, const BipartiteNetwork& network) {
  CsvWriter w(out);
  w.row({"intervention_id", "outcome_id", "weight"});
  for (const auto& t : network.to_triplets()) {
    w.field(t.intervention_id).field(t.outcome_id).field(t.weight);
    w.end_row();
  }
}

BipartiteNetwork derive_exposure_structure(BipartiteNetwork network, ExposureMapping mapping) {
  if (!mapping.gamma || mapping.upwind_size == 0) {
    throw ParameterError("exposure mapping '" + mapping.name + "' is incomplete");
  }
  const std::size_t n = network.num_outcomes();
  const std::size_t needed = mapping.upwind_size + 1;
  network.key_of_.assign(n, 0);
  network.key_weight_.assign(n, 0.0);
  network.upwind_of_.assign(n, {});
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inc = network.incident_[i];
    if (inc.size() < needed) {
      throw DegenerateError("outcome unit '" + network.outcome_ids_[i] + "' has " +
                            std::to_string(inc.size()) + " incident intervention unit(s); " +
                            std::to_string(needed) + " required");
    }
    order.assign(inc.begin(), inc.end());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(needed),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        const auto& ea = network.entries_[a];
                        const auto& eb = network.entries_[b];
                        if (ea.weight != eb.weight) return ea.weight > eb.weight;
                        return ea.intervention < eb.intervention;
                      });
    network.key_of_[i] = network.entries_[order[0]].intervention;
    network.key_weight_[i] = network.entries_[order[0]].weight;
    auto& up = network.upwind_of_[i];
    for (std::size_t r = 1; r < needed; ++r) up.push_back(network.entries_[order[r]].intervention);
  }
  network.mapping_ = std::move(mapping);
  network.derived_ = true;
  return network;
}

std::optional<std::size_t> UnitTable::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  return std::nullopt;
}

Eigen::VectorXd UnitTable::column(std::string_view name) const {
  if (auto c = column_index(name)) return covariates.col(static_cast<Eigen::Index>(*c));
  throw FormatError("unit table has no column '" + std::string(name) + "'");
}

UnitTable UnitTable::subset(std::span<const std::size_t> rows) const {
  UnitTable out;
  out.columns = columns;
  out.ids.reserve(rows.size());
  out.covariates.resize(static_cast<Eigen::Index>(rows.size()), covariates.cols());
  if (treatment) out.treatment.emplace();
  if (outcome) out.outcome.emplace(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    out.ids.push_back(ids[r]);
    out.covariates.row(static_cast<Eigen::Index>(k)) = covariates.row(static_cast<Eigen::Index>(r));
    if (treatment) out.treatment->push_back((*treatment)[r]);
    if (outcome) (*out.outcome)(static_cast<Eigen::Index>(k)) = (*outcome)(static_cast<Eigen::Index>(r));
  }
  return out;
}

void UnitTable::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw FormatError("unit table: empty id");
    if (!seen.insert(id).second) throw DuplicateError("unit table: duplicate id '" + id + "'");
  }
  if (static_cast<std::size_t>(covariates.rows()) != ids.size() ||
      static_cast<std::size_t>(covariates.cols()) != columns.size()) {
    throw FormatError("unit table: covariate matrix shape does not match ids/columns");
  }
  if (!covariates.allFinite()) throw FormatError("unit table: non-finite covariate value");
  if (treatment) {
    if (treatment->size() != ids.size()) throw FormatError("unit table: treatment length mismatch");
    for (int t : *treatment) {
      if (t != 0 && t != 1) throw FormatError("unit table: treatment values must be 0 or 1");
    }
  }
  if (outcome) {
    if (static_cast<std::size_t>(outcome->size()) != ids.size()) {
      throw FormatError("unit table: outcome length mismatch");
    }
    if (!outcome->allFinite()) throw FormatError("unit table: non-finite outcome value");
  }
}

UnitTable read_unit_table(const std::filesystem::path& path, UnitSide side) {
  const CsvTable csv = read_csv(path);
  const std::size_t id_col = csv.require_column("id");
  const char* special = side == UnitSide::intervention ? "treatment" : "outcome";
  const auto special_col = csv.column(special);

  UnitTable table;
  std::vector<std::size_t> cov_cols;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (c == id_col || (special_col && c == *special_col)) continue;
    cov_cols.push_back(c);
    table.columns.push_back(csv.header[c]);
  }
  {
    std::unordered_set<std::string> names;
    for (const auto& h : csv.header) {
      if (!names.insert(h).second) {
        throw FormatError(path.string() + ": duplicate column '" + h + "'");
      }
    }
  }
  const auto rows = static_cast<Eigen::Index>(csv.rows.size());
  table.covariates.resize(rows, static_cast<Eigen::Index>(cov_cols.size()));
  if (special_col && side == UnitSide::intervention) table.treatment.emplace();
  if (special_col && side == UnitSide::outcome) table.outcome.emplace(rows);

  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    const auto where = [&](std::size_t c) {
      return path.string() + ": row " + std::to_string(r + 2) + ": column '" + csv.header[c] + "'";
    };
    table.ids.push_back(cells[id_col]);
    for (std::size_t k = 0; k < cov_cols.size(); ++k) {
      const auto v = parse_double(cells[cov_cols[k]]);
      if (!v) throw FormatError(where(cov_cols[k]) + " is not a finite real: '" + cells[cov_cols[k]] + "'");
      table.covariates(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = *v;
    }
    if (special_col) {
      const auto v = parse_double(cells[*special_col]);
      if (!v) throw FormatError(where(*special_col) + " is not a finite real: '" + cells[*special_col] + "'");
      if (side == UnitSide::intervention) {
        if (*v != 0.0 && *v != 1.0) throw FormatError(where(*special_col) + " must be 0 or 1");
        table.treatment->push_back(static_cast<int>(*v));
      } else {
        (*table.outcome)(static_cast<Eigen::Index>(r)) = *v;
      }
    }
  }
  try {
    table.validate();
  } catch (const InputError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return table;
}

UnitTable align_table(const UnitTable& table, std::span<const std::string> ids) {
  std::unordered_map<std::string, std::size_t> lookup;
  lookup.reserve(table.ids.size());
  for (std::size_t r = 0; r < table.ids.size(); ++r) lookup.emplace(table.ids[r], r);
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = lookup.find(id);
    if (it == lookup.end()) throw MappingError("unit '" + id + "' is missing from the unit table");
    rows.push_back(it->second);
  }
  return table.subset(rows);
}

FilterResult filter_low_influence(const BipartiteNetwork& network, double q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw ParameterError("filter quantile must lie in [0, 1), got " + std::to_string(q));
  }
  if (!network.derived()) throw ParameterError("filter_low_influence requires a derived network");
  const std::size_t n = network.num_outcomes();
  std::vector<double> key_weights(n);
  for (std::size_t i = 0; i < n; ++i) key_weights[i] = network.key_weight(i);
  const double cut = n > 0 ? quantile(key_weights, q) : 0.0;

  std::vector<char> keep(n, 0);
  FilterResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(key_weights[i] < cut)) {
      keep[i] = 1;
      result.kept_outcomes.push_back(i);
    }
  }
  std::vector<InfluenceTriplet> rows;
  std::vector<char> used(network.num_interventions(), 0);
  for (const auto& e : network.entries()) {
    if (!keep[e.outcome]) continue;
    used[e.intervention] = 1;
    rows.push_back({network.intervention_ids()[e.intervention], network.outcome_ids()[e.outcome],
                    e.weight});
  }
  BipartiteNetwork rebuilt = BipartiteNetwork::from_triplets(rows);
  result.network = derive_exposure_structure(std::move(rebuilt), network.mapping());
  // Rebuilt indices follow first appearance; report original indices in that order.
  for (const auto& id : result.network.intervention_ids()) {
    result.kept_interventions.push_back(*network.intervention_index(id));
  }
  std::vector<std::size_t> kept_outcomes;
  for (const auto& id : result.network.outcome_ids()) {
    kept_outcomes.push_back(*network.outcome_index(id));
  }
  result.kept_outcomes = std::move(kept_outcomes);
  return result;
}

CovariateSummary CovariateSummary::imputed() const {
  CovariateSummary out = *this;
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
      if (!empty[static_cast<std::size_t>(j)]) {
        sum += values(j, c);
        ++count;
      }
    }
    const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
    for (Eigen::Index j = 0; j < values.rows(); ++j) {
      if (empty[static_cast<std::size_t>(j)]) out.values(j, c) = fill;
    }
  }
  return out;
}

CovariateSummary summarize_outcome_covariates(const BipartiteNetwork& network,
                                              const UnitTable& outcome_table, Role role) {
  if (!network.derived()) throw ParameterError("covariate summaries require a derived network");
  if (outcome_table.size() != network.num_outcomes()) {
    throw MappingError("outcome table has " + std::to_string(outcome_table.size()) +
                       " rows but the network has " + std::to_string(network.num_outcomes()) +
                       " outcome units");
  }
  const auto J = static_cast<Eigen::Index>(network.num_interventions());
  const auto p = outcome_table.covariates.cols();
  CovariateSummary s;
  s.role = role;
  const std::string prefix = role == Role::key ? "Key" : "Upwind";
  for (const auto& c : outcome_table.columns) s.columns.push_back(prefix + c);
  s.values = Eigen::MatrixXd::Zero(J, p);
  s.group_size.assign(static_cast<std::size_t>(J), 0);

  const auto add = [&](std::size_t j, std::size_t i) {
    s.values.row(static_cast<Eigen::Index>(j)) += outcome_table.covariates.row(static_cast<Eigen::Index>(i));
    ++s.group_size[j];
  };
  for (std::size_t i = 0; i < network.num_outcomes(); ++i) {
    if (role == Role::key) {
      add(network.key_of(i), i);
    } else {
      for (std::size_t j : network.upwind_of(i)) add(j, i);
    }
  }
  s.empty.assign(static_cast<std::size_t>(J), 0);
  for (Eigen::Index j = 0; j < J; ++j) {
    const auto size = s.group_size[static_cast<std::size_t>(j)];
    if (size == 0) {
      s.empty[static_cast<std::size_t>(j)] = 1;
      s.values.row(j).setConstant(std::numeric_limits<double>::quiet_NaN());
    } else {
      s.values.row(j) /= static_cast<double>(size);
    }
  }
  return s;
}

ExposureAssignment map_treatments(const BipartiteNetwork& network, std::span<const int> treatments) {
  if (!network.derived()) throw ParameterError("map_treatments requires a derived network");
  if (treatments.size() != network.num_interventions()) {
    throw MappingError("treatment vector covers " + std::to_string(treatments.size()) + " of " +
                       std::to_string(network.num_interventions()) + " intervention units");
  }
  for (std::size_t j = 0; j < treatments.size(); ++j) {
    if (treatments[j] != 0 && treatments[j] != 1) {
      throw MappingError("intervention unit '" + network.intervention_ids()[j] +
                         "' has a missing or non-binary treatment");
    }
  }
  ExposureAssignment a;
  const std::size_t n = network.num_outcomes();
  a.z.resize(n);
  a.g.resize(n);
  std::vector<int> upwind_t;
  for (std::size_t i = 0; i < n; ++i) {
    a.z[i] = treatments[network.key_of(i)];
    upwind_t.clear();
    for (std::size_t j : network.upwind_of(i)) upwind_t.push_back(treatments[j]);
    const int g = network.mapping().gamma(upwind_t);
    if (g != 0 && g != 1) throw MappingError("exposure mapping returned a non-binary value");
    a.g[i] = g;
  }
  return a;
}

CellCounts cell_counts(const ExposureAssignment& assignment) {
  CellCounts counts{};
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    ++counts[static_cast<std::size_t>(assignment.z[i])][static_cast<std::size_t>(assignment.g[i])];
  }
  return counts;
}

}  // namespace bni
