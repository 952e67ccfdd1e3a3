#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>
#include <sstream>

#include "paternalism/errors.hpp"
#include "paternalism/stats_tests.hpp"

using namespace paternalism;

TEST_CASE("proportion parsing") {
  const auto s = parse_proportion("43/54");
  CHECK(s.successes == 43);
  CHECK(s.total == 54);
  CHECK_THROWS_AS(parse_proportion("43"), DomainError);
  CHECK_THROWS_AS(parse_proportion("5/4"), DomainError);
  CHECK_THROWS_AS(parse_proportion("0/0"), DomainError);
}

TEST_CASE("Yates chi-square reference values") {
  auto r = prop_test_yates({43, 54}, {12, 23});
  CHECK(r.chi2 == doctest::Approx(4.68854).epsilon(1e-4));
  CHECK(r.p == doctest::Approx(0.03037).epsilon(1e-3));
  r = prop_test_yates({13, 54}, {15, 236});
  CHECK(r.chi2 == doctest::Approx(13.8492).epsilon(1e-4));
  CHECK(r.p < 0.001);
  r = prop_test_yates({10, 40}, {10, 40});
  CHECK(r.chi2 == 0.0);
  CHECK(r.p == 1.0);
}

TEST_CASE("degenerate pooled proportion") {
  const auto r = prop_test_yates({0, 10}, {0, 20});
  CHECK(r.degenerate);
  CHECK(r.p == 1.0);
  CHECK_THROWS_AS(prop_test_yates({0, 0}, {1, 2}), DomainError);
}

TEST_CASE("Yates is symmetric and never exceeds the uncorrected statistic") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5000; ++i) {
    const long long na = 1 + rng() % 200, nb = 1 + rng() % 200;
    const ProportionSample a{static_cast<long long>(rng() % (na + 1)), na};
    const ProportionSample b{static_cast<long long>(rng() % (nb + 1)), nb};
    const auto ab = prop_test_yates(a, b), ba = prop_test_yates(b, a);
    REQUIRE(ab.chi2 == ba.chi2);
    if (!ab.degenerate) REQUIRE(ab.chi2 <= prop_test_uncorrected(a, b).chi2 + 1e-12);
  }
}

TEST_CASE("chi-square survival function") {
  CHECK(chi2_1_sf(0.0) == 1.0);
  CHECK(chi2_1_sf(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("midranks") {
  RankPanel p(1, 4);
  p << 3, 1, 3, 2;
  const auto r = within_row_midranks(p);
  CHECK(r(0, 0) == 3.5);
  CHECK(r(0, 1) == 1.0);
  CHECK(r(0, 2) == 3.5);
  CHECK(r(0, 3) == 2.0);
}

TEST_CASE("Page's L: monotone and constant panels") {
  RankPanel mono(5, 4);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) mono(i, j) = j * (i + 1.0);
  auto r = pages_l(mono);
  CHECK(r.L == 5.0 * (1 + 4 + 9 + 16));
  CHECK(r.p_one_sided < 0.01);

  const RankPanel flat = RankPanel::Constant(6, 5, 2.0);
  r = pages_l(flat);
  CHECK(r.L == doctest::Approx(r.mean));
  CHECK(r.chi2 == doctest::Approx(0.0));
  CHECK(r.p == doctest::Approx(1.0));

  CHECK_THROWS_AS(pages_l(RankPanel::Zero(3, 2)), DomainError);
}

TEST_CASE("Page's L matches a brute-force rank count") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    RankPanel p(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p(i, j) = u(rng);
    double L = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        int rank = 1;
        for (int m = 0; m < 3; ++m)
          if (p(i, m) < p(i, j)) ++rank;
        L += (j + 1) * rank;
      }
    REQUIRE(pages_l(p).L == L);
  }
}

TEST_CASE("Page's L invariances") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(0, 3);
  RankPanel p(20, 6);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 6; ++j) p(i, j) = d(rng) + 0.5 * j;
  const auto base = pages_l(p);

  auto transformed = p;
  transformed.row(4) = transformed.row(4).array().exp() * 3.0 + 1.0;
  CHECK(pages_l(transformed).L == base.L);

  const RankPanel reversed = p.rowwise().reverse();
  const auto rev = pages_l(reversed);
  CHECK(rev.z == doctest::Approx(-base.z));
  CHECK(rev.chi2 == doctest::Approx(base.chi2));
}

TEST_CASE("panel reader") {
  std::istringstream in("k0,k1,k2\n1,0,0\n1,1,0\n");
  const auto p = read_rank_panel(in);
  CHECK(p.rows() == 2);
  CHECK(p.cols() == 3);
  std::istringstream ragged("1,0,0\n1,1\n");
  CHECK_THROWS_AS(read_rank_panel(ragged), DomainError);
}

TEST_CASE("k rank") {
  CHECK(k_rank(Knowledge::draws(0)) == 0);
  CHECK(k_rank(Knowledge::draws(5)) == 3);
  CHECK(k_rank(Knowledge::draws(1000)) == 7);
  CHECK(k_rank(Knowledge::exact()) == 8);
  CHECK_THROWS_AS(k_rank(Knowledge::draws(3)), DomainError);
}
