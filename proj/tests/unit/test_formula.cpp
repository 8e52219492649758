#include <doctest.h>

#include "bni/error.hpp"
#include "bni/formula.hpp"

TEST_SUITE("formula") {

TEST_CASE("parses terms, interactions and powers") {
  const auto f = bni::Formula::parse(" KeyLogPop + KeyLogPop:KeyPctUrban+LogOpTime^2 ");
  REQUIRE(f.terms().size() == 3);
  CHECK(f.terms()[0].label() == "KeyLogPop");
  CHECK(f.terms()[1].factors.size() == 2);
  CHECK(f.terms()[1].factors[1].column == "KeyPctUrban");
  CHECK(f.terms()[2].factors[0].power == 2);
  CHECK(f.to_string() == "KeyLogPop + KeyLogPop:KeyPctUrban + LogOpTime^2");
  CHECK(f.referenced_columns() == std::vector<std::string>{"KeyLogPop", "KeyPctUrban", "LogOpTime"});
  CHECK(f.references("LogOpTime"));
  CHECK_FALSE(f.references("LogPop"));
  CHECK(bni::Formula::parse("  ").empty());
  CHECK(bni::Formula::parse(f.to_string()).to_string() == f.to_string());
}

TEST_CASE("malformed formulas raise ConfigError") {
  for (std::string bad : {"a + ", "a ++ b", "a:", "a^0", "a^x", "a b", "a-b", "a^2.5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(bni::Formula::parse(bad), bni::ConfigError);
  }
}

TEST_CASE("build_design evaluates products and powers") {
  bni::NamedColumns cols(3);
  cols.set("a", Eigen::Vector3d(1, 2, 3));
  cols.set("b", Eigen::Vector3d(-1, 0, 2));
  const auto x = bni::build_design(bni::Formula::parse("a + a:b + b^3 + a^2:b"), cols);
  REQUIRE(x.cols() == 4);
  CHECK(x(2, 0) == 3);
  CHECK(x(0, 1) == -1);
  CHECK(x(2, 1) == 6);
  CHECK(x(2, 2) == 8);
  CHECK(x(2, 3) == 18);
  CHECK(bni::build_design(bni::Formula(), cols).cols() == 0);
}

TEST_CASE("unknown columns are named in the error") {
  bni::NamedColumns cols(2);
  cols.set("a", Eigen::Vector2d(1, 2));
  try {
    bni::build_design(bni::Formula::parse("a + zeta"), cols);
    FAIL("expected ConfigError");
  } catch (const bni::ConfigError& e) {
    CHECK(std::string(e.what()).find("zeta") != std::string::npos);
  }
  CHECK_THROWS_AS(cols.set("b", Eigen::Vector3d(1, 2, 3)), bni::ParameterError);
}

TEST_CASE("NamedColumns subset and replacement") {
  bni::NamedColumns cols(3);
  cols.set("a", Eigen::Vector3d(1, 2, 3));
  cols.set("a", Eigen::Vector3d(4, 5, 6));
  CHECK(cols.names().size() == 1);
  const std::vector<std::size_t> rows{2, 2, 0};
  const auto s = cols.subset(rows);
  CHECK(s.rows() == 3);
  CHECK(s.get("a")(0) == 6);
  CHECK(s.get("a")(2) == 4);
}

}
