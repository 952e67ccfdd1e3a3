#include <doctest.h>

#include <limits>
#include <sstream>

#include "paternalism/csv.hpp"
#include "paternalism/errors.hpp"

using namespace paternalism;

TEST_CASE("number formatting") {
  CHECK(csv::format_number(0.1) == "0.1");
  CHECK(csv::format_number(0.36151, 3) == "0.362");
  CHECK(csv::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(csv::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  // Shortest form round-trips.
  const double v = 0.1 + 0.2;
  CHECK(csv::parse_double(csv::format_number(v)) == v);
}

TEST_CASE("reading tables") {
  std::istringstream in("# comment\na,b\n\n1,2\n 3 , 4\n");
  const auto t = csv::read(in);
  CHECK(t.header.size() == 2);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), DomainError);

  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS_AS(csv::read(ragged), DomainError);
}

TEST_CASE("numeric matrices skip a header") {
  std::istringstream in("c1,c2,c3\n1,2,3\n4,5,6\n");
  const auto m = csv::read_numeric(in);
  REQUIRE(m.size() == 2);
  CHECK(m[1][2] == 6.0);
  std::istringstream bare("1,2\n3,4\n");
  CHECK(csv::read_numeric(bare).size() == 2);
}

TEST_CASE("parsing") {
  CHECK(csv::parse_double("inf") == std::numeric_limits<double>::infinity());
  CHECK(csv::parse_int("42") == 42);
  CHECK_THROWS_AS(csv::parse_double("x1"), DomainError);
  CHECK_THROWS_AS(csv::parse_int("4.2"), DomainError);
}
