#include "bni/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "bni/error.hpp"

namespace bni {

namespace {

std::vector<std::string> split_record(const std::string& line, const std::filesystem::path& source,
                                      std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          cell.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  if (quoted) {
    throw FormatError(source.string() + ":" + std::to_string(line_no) + ": unterminated quote");
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
  if (auto c = column(name)) return *c;
  throw FormatError(source.string() + ": missing required column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::istream& in, const std::filesystem::path& source) {
  CsvTable table;
  table.source = source;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    auto cells = split_record(line, source, line_no);
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      for (const auto& h : cells) {
        if (h.empty()) throw FormatError(source.string() + ": empty column name in header");
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw FormatError(source.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_header) throw FormatError(source.string() + ": missing header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(in, path);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  if (value == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  if (!first_) out_ << ',';
  first_ = false;
  if (text.find_first_of(",\"\n") != std::string_view::npos) {
    out_ << '"';
    for (char c : text) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << text;
  }
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(long long value) { return field(std::string_view(std::to_string(value))); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void CsvWriter::row(std::initializer_list<std::string_view> cells) {
  for (auto c : cells) field(c);
  end_row();
}

}  // namespace bni
