#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "bni/csv.hpp"
#include "bni/error.hpp"

TEST_SUITE("csv") {

TEST_CASE("parses quoted fields, BOM, CRLF and blank lines") {
  std::istringstream in("\xEF\xBB\xBFid,name , v\r\n\r\na,\"x, \"\"y\"\"\",1.5\r\nb, plain ,2\n");
  const auto t = bni::parse_csv(in);
  REQUIRE(t.header.size() == 3);
  CHECK(t.header[1] == "name");
  CHECK(t.header[2] == "v");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x, \"y\"");
  CHECK(t.rows[1][1] == "plain");
  CHECK(t.require_column("v") == 2);
  CHECK_FALSE(t.column("missing").has_value());
}

TEST_CASE("ragged rows and missing columns are format errors") {
  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS_AS(bni::parse_csv(ragged), bni::FormatError);
  std::istringstream ok("a,b\n1,2\n");
  const auto t = bni::parse_csv(ok, "f.csv");
  try {
    t.require_column("weight");
    FAIL("expected FormatError");
  } catch (const bni::FormatError& e) {
    CHECK(std::string(e.what()).find("weight") != std::string::npos);
  }
}

TEST_CASE("missing file is an I/O error naming the path") {
  try {
    bni::read_csv("/nonexistent/dir/net.csv");
    FAIL("expected IoError");
  } catch (const bni::IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/net.csv") != std::string::npos);
  }
}

TEST_CASE("parse_double accepts finite reals only") {
  CHECK(bni::parse_double("1.25").value() == 1.25);
  CHECK(bni::parse_double("+3").value() == 3.0);
  CHECK(bni::parse_double("-2e-3").value() == -0.002);
  CHECK_FALSE(bni::parse_double("").has_value());
  CHECK_FALSE(bni::parse_double("1,5").has_value());
  CHECK_FALSE(bni::parse_double("nan").has_value());
  CHECK_FALSE(bni::parse_double("inf").has_value());
  CHECK_FALSE(bni::parse_double("2x").has_value());
}

TEST_CASE("format_double prints 17 significant digits and round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -123456.789, 1e-300, 6.02214076e23}) {
    const auto s = bni::format_double(v);
    CHECK(bni::parse_double(s).value() == v);
  }
  CHECK(bni::format_double(0.1) == "0.10000000000000001");
  CHECK(bni::format_double(std::numeric_limits<double>::quiet_NaN()) == "NA");
}

TEST_CASE("writer quotes fields that need it") {
  std::ostringstream out;
  bni::CsvWriter w(out);
  w.row({"a", "b,c", "say \"hi\""});
  w.field(1.5).field(2).end_row();
  CHECK(out.str() == "a,\"b,c\",\"say \"\"hi\"\"\"\n1.5,2\n");
}

}
