#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace bni {

// Dense columns addressed by name; row count shared by all columns.
class NamedColumns {
 public:
  NamedColumns() = default;
  explicit NamedColumns(Eigen::Index rows) : rows_(rows) {}

  Eigen::Index rows() const { return rows_; }
  const std::vector<std::string>& names() const { return names_; }
  bool has(std::string_view name) const;
  // Adds or replaces a column.
  void set(const std::string& name, Eigen::VectorXd values);
  const Eigen::VectorXd& get(std::string_view name) const;
  NamedColumns subset(std::span<const std::size_t> rows) const;

 private:
  Eigen::Index rows_ = 0;
  std::vector<std::string> names_;
  std::vector<Eigen::VectorXd> columns_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct FormulaFactor {
  std::string column;
  int power = 1;
};

// Product of factors, e.g. `KeyLogPop:KeyPctUrban` or `LogOpTime^2`.
struct FormulaTerm {
  std::vector<FormulaFactor> factors;
  std::string label() const;
};

// Right-hand side of a linear model: terms joined by `+`. Factors within a
// term are joined by `:` and may carry an integer power `^k`. The intercept
// is implicit and added by the fitting routines.
class Formula {
 public:
  Formula() = default;
  explicit Formula(std::vector<FormulaTerm> terms) : terms_(std::move(terms)) {}

  // Throws ConfigError on malformed text.
  static Formula parse(std::string_view text);

  const std::vector<FormulaTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::vector<std::string> referenced_columns() const;
  bool references(std::string_view column) const;
  std::string to_string() const;

 private:
  std::vector<FormulaTerm> terms_;
};

// One design column per term (no intercept). Throws ConfigError naming the
// first referenced column that `columns` does not provide.
Eigen::MatrixXd build_design(const Formula& formula, const NamedColumns& columns);

}  // namespace bni
