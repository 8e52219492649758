#include "bni/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "bni/error.hpp"

namespace bni {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

template <typename F>
void split_each(std::string_view text, char sep, F&& f) {
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    f(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return;
    start = pos + 1;
  }
}

}  // namespace

bool NamedColumns::has(std::string_view name) const {
  return lookup_.find(std::string(name)) != lookup_.end();
}

void NamedColumns::set(const std::string& name, Eigen::VectorXd values) {
  if (names_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_) {
    throw ParameterError("column '" + name + "' has " + std::to_string(values.size()) +
                         " rows; expected " + std::to_string(rows_));
  }
  auto it = lookup_.find(name);
  if (it != lookup_.end()) {
    columns_[it->second] = std::move(values);
    return;
  }
  lookup_.emplace(name, names_.size());
  names_.push_back(name);
  columns_.push_back(std::move(values));
}

const Eigen::VectorXd& NamedColumns::get(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw ConfigError("unknown column '" + std::string(name) + "'");
  return columns_[it->second];
}

NamedColumns NamedColumns::subset(std::span<const std::size_t> rows) const {
  NamedColumns out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < names_.size(); ++c) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      v(static_cast<Eigen::Index>(k)) = columns_[c](static_cast<Eigen::Index>(rows[k]));
    }
    out.set(names_[c], std::move(v));
  }
  return out;
}

std::string FormulaTerm::label() const {
  std::string out;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k) out += ':';
    out += factors[k].column;
    if (factors[k].power != 1) out += '^' + std::to_string(factors[k].power);
  }
  return out;
}

Formula Formula::parse(std::string_view text) {
  std::vector<FormulaTerm> terms;
  if (strip(text).empty()) return Formula();
  split_each(text, '+', [&](std::string_view raw_term) {
    const auto term_text = strip(raw_term);
    if (term_text.empty()) throw ConfigError("formula '" + std::string(text) + "': empty term");
    FormulaTerm term;
    split_each(term_text, ':', [&](std::string_view raw_factor) {
      auto factor_text = strip(raw_factor);
      FormulaFactor factor;
      if (const auto caret = factor_text.find('^'); caret != std::string_view::npos) {
        const auto exponent = strip(factor_text.substr(caret + 1));
        int power = 0;
        const auto [ptr, ec] = std::from_chars(exponent.data(), exponent.data() + exponent.size(), power);
        if (ec != std::errc() || ptr != exponent.data() + exponent.size() || power < 1) {
          throw ConfigError("formula '" + std::string(text) + "': bad exponent in '" +
                            std::string(factor_text) + "'");
        }
        factor.power = power;
        factor_text = strip(factor_text.substr(0, caret));
      }
      if (!valid_name(factor_text)) {
        throw ConfigError("formula '" + std::string(text) + "': invalid column name '" +
                          std::string(factor_text) + "'");
      }
      factor.column = std::string(factor_text);
      term.factors.push_back(std::move(factor));
    });
    terms.push_back(std::move(term));
  });
  return Formula(std::move(terms));
}

std::vector<std::string> Formula::referenced_columns() const {
  std::vector<std::string> out;
  for (const auto& t : terms_) {
    for (const auto& f : t.factors) {
      if (std::find(out.begin(), out.end(), f.column) == out.end()) out.push_back(f.column);
    }
  }
  return out;
}

bool Formula::references(std::string_view column) const {
  for (const auto& t : terms_) {
    for (const auto& f : t.factors) {
      if (f.column == column) return true;
    }
  }
  return false;
}

std::string Formula::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (k) out += " + ";
    out += terms_[k].label();
  }
  return out;
}

Eigen::MatrixXd build_design(const Formula& formula, const NamedColumns& columns) {
  Eigen::MatrixXd design(columns.rows(), static_cast<Eigen::Index>(formula.terms().size()));
  for (std::size_t t = 0; t < formula.terms().size(); ++t) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(columns.rows());
    for (const auto& f : formula.terms()[t].factors) {
      if (!columns.has(f.column)) {
        throw ConfigError("formula term '" + formula.terms()[t].label() + "' references unknown column '" +
                          f.column + "'");
      }
      const auto& c = columns.get(f.column);
      for (int k = 0; k < f.power; ++k) v.array() *= c.array();
    }
    design.col(static_cast<Eigen::Index>(t)) = v;
  }
  return design;
}

}  // namespace bni
