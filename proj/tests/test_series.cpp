#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "igrowth/series.hpp"

using namespace igrowth;
using series::TruncSeries;

namespace {

TruncSeries make(int order, std::vector<long> low) {
  TruncSeries s(order);
  for (size_t i = 0; i < low.size(); ++i) s[static_cast<int>(i)] = low[i];
  return s;
}

TruncSeries random_series(std::mt19937& rng, int order) {
  std::uniform_int_distribution<int> d(-9, 9);
  TruncSeries s(order);
  for (int i = 0; i <= order; ++i) s[i] = d(rng);
  return s;
}

}  // namespace

TEST_CASE("add and mul basics") {
  CHECK((make(2, {1, 1}) + make(2, {1, -1})) == make(2, {2}));
  CHECK((make(2, {1, 1}) * make(2, {1, 1})) == make(2, {1, 2, 1}));
  // (z + z^2 + z^4)^2 truncated at 8
  TruncSeries s = make(8, {0, 1, 1, 0, 1});
  CHECK((s * s) == make(8, {0, 0, 1, 2, 1, 2, 2, 0, 1}));
}

TEST_CASE("order mismatch is an error") {
  CHECK_THROWS_AS(make(3, {1}) + make(4, {1}), Error);
  CHECK_THROWS_AS(make(3, {1}) * make(4, {1}), Error);
}

TEST_CASE("division") {
  CHECK((TruncSeries::one(4) / make(4, {1, -1})) == make(4, {1, 1, 1, 1, 1}));
  CHECK((TruncSeries::one(6) / make(6, {1, 0, -2})) == make(6, {1, 0, 2, 0, 4, 0, 8}));
  // z^3 / ((1-z)(1-z^2)) at order 6
  TruncSeries num = make(6, {0, 0, 0, 1});
  TruncSeries den = make(6, {1, -1}) * make(6, {1, 0, -1});
  TruncSeries q = num / den;
  CHECK(q == make(6, {0, 0, 0, 1, 1, 2, 2}));
  CHECK(q * den == num);
  CHECK_THROWS_AS(TruncSeries::one(3) / make(3, {2}), Error);
  CHECK_THROWS_AS(TruncSeries::one(3) / make(3, {0, 1}), Error);
}

TEST_CASE("expand_rational") {
  // z^2/(1-z)^2 has coefficients n-1 for n >= 2
  auto s = series::expand_rational({0, 0, 1}, {1, -2, 1}, 8);
  for (int n = 2; n <= 8; ++n) CHECK(s[n] == n - 1);
  CHECK(series::expand_rational({1}, {1}, 5) == TruncSeries::one(5));
  CHECK_THROWS_AS(series::expand_rational({1}, {0, 1}, 5), Error);
}

TEST_CASE("rational spec parsing") {
  auto [p, q] = series::parse_rational("z^4(1+3z)/((1-z)^3(1+z)^2)");
  TruncSeries lhs = series::expand_rational(p, q, 20);
  // denominator expanded by hand
  std::vector<BigInt> qh{1, -1, -2, 2, 1, -1};
  TruncSeries rhs = series::expand_rational({0, 0, 0, 0, 1, 3}, qh, 20);
  CHECK(lhs == rhs);
  // frozen prefix of the expansion
  std::vector<long> head{0, 0, 0, 0, 1, 4, 6, 12, 15, 24, 28, 40, 45, 60, 66, 84, 91, 112, 120,
                         144, 153};
  for (int i = 0; i <= 20; ++i) CHECK(lhs[i] == head[i]);

  auto [p2, q2] = series::parse_rational("1/(1-2z^2)");
  CHECK(series::expand_rational(p2, q2, 6) == make(6, {1, 0, 2, 0, 4, 0, 8}));

  auto [p3, q3] = series::parse_rational("3z^2 - z + 1");
  CHECK(q3.size() == 1);
  CHECK(q3[0] == 1);
  CHECK(series::expand_rational(p3, q3, 4) == make(4, {1, -1, 3}));

  CHECK_THROWS_AS(series::parse_rational("z^"), Error);
  CHECK_THROWS_AS(series::parse_rational("1/(1-z"), Error);
  CHECK_THROWS_AS(series::parse_rational("q+1"), Error);
}

TEST_CASE("reference sequences") {
  auto p = series::reference_sequence(series::ReferenceKind::partitions, 20).coeffs;
  std::vector<long> p_expect{1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231,
                             297, 385, 490, 627};
  for (int i = 0; i <= 20; ++i) CHECK(p[i] == p_expect[i]);

  auto tau = series::reference_sequence(series::ReferenceKind::tau, 6).coeffs;
  std::vector<long> tau_expect{0, 1, 2, 2, 3, 2, 4};
  for (int i = 0; i <= 6; ++i) CHECK(tau[i] == tau_expect[i]);

  auto phi = series::reference_sequence(series::ReferenceKind::phi, 8).coeffs;
  std::vector<long> phi_expect{0, 0, 1, 2, 2, 4, 2, 6, 4};
  for (int i = 0; i <= 8; ++i) CHECK(phi[i] == phi_expect[i]);

  CHECK_THROWS_AS(series::parse_reference_kind("fibonacci"), Error);
}

TEST_CASE("sigma agrees with the divisor-sum identity") {
  auto sigma = series::reference_sequence(series::ReferenceKind::sigma, 40).coeffs;
  for (int m = 1; m <= 40; ++m) {
    BigInt lambert = 0;
    for (int n = 1; n <= m; ++n)
      if (m % n == 0) lambert += m / n;
    CHECK(sigma[m] == lambert);
  }
}

TEST_CASE("pow2_floor_sqrt agrees with the partial-sum form") {
  auto v = series::reference_sequence(series::ReferenceKind::pow2_floor_sqrt, 40).coeffs;
  for (int m = 0; m <= 40; ++m) {
    BigInt alt = 1;
    for (int k = 0; (k + 1) * (k + 1) <= m; ++k) alt += BigInt(1) << k;
    CHECK(v[m] == alt);
  }
}

TEST_CASE("diagonal sums") {
  series::BivariateGrid coprime(8, 8);
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j)
      coprime.at(i, j) = (i >= 1 && j >= 1 && std::gcd(i, j) == 1) ? 1 : 0;
  auto d = series::diagonal_sum(coprime, 6).coeffs;
  std::vector<long> want{0, 0, 1, 2, 2, 4, 2};  // phi(n) for n >= 2
  for (int n = 0; n <= 6; ++n) CHECK(d[n] == want[n]);

  series::BivariateGrid ones(4, 4);
  for (auto& c : ones.cells) c = 1;
  auto d1 = series::diagonal_sum(ones, 4).coeffs;
  for (int n = 0; n <= 4; ++n) CHECK(d1[n] == n + 1);

  series::BivariateGrid single(6, 6);
  single.at(3, 2) = 1;
  auto d2 = series::diagonal_sum(single, 6).coeffs;
  for (int n = 0; n <= 6; ++n) CHECK(d2[n] == (n == 5 ? 1 : 0));

  CHECK_THROWS_AS(series::diagonal_sum(single, 7), Error);
}

TEST_CASE("ring laws on random series") {
  std::mt19937 rng(20260808);
  for (int iter = 0; iter < 50; ++iter) {
    TruncSeries a = random_series(rng, 8);
    TruncSeries b = random_series(rng, 8);
    TruncSeries c = random_series(rng, 8);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("division inverts multiplication on random series") {
  std::mt19937 rng(42);
  for (int iter = 0; iter < 50; ++iter) {
    TruncSeries a = random_series(rng, 10);
    TruncSeries b = random_series(rng, 10);
    b[0] = iter % 2 ? 1 : -1;
    CHECK((a / b) * b == a);
  }
}

TEST_CASE("expand_rational times Q gives back P") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-4, 4);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<BigInt> p(5), q(4);
    for (auto& x : p) x = d(rng);
    for (auto& x : q) x = d(rng);
    q[0] = iter % 2 ? 1 : -1;
    int order = 12;
    TruncSeries e = series::expand_rational(p, q, order);
    CHECK(e * TruncSeries(order, q) == TruncSeries(order, p));
  }
}
