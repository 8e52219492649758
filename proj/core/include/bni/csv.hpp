#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bni {

// Header plus string cells. Comma-delimited, UTF-8, optional double-quoted
// fields with "" escapes.
struct CsvTable {
  std::filesystem::path source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws FormatError naming the missing column and the file.
  std::size_t require_column(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in, const std::filesystem::path& source = "<stream>");
CsvTable read_csv(const std::filesystem::path& path);

// Parses a finite real using '.' as the decimal separator.
std::optional<double> parse_double(std::string_view text);

// 17 significant digits, round-trip exact. NaN prints as "NA".
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  void end_row();

  void row(std::initializer_list<std::string_view> cells);

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace bni
