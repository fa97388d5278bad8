#include <gtest/gtest.h>

#include <random>

#include "cchaos/wick.hpp"

using namespace cchaos;

namespace {

// Independent oracle: count perfect matchings of an explicit list of factor
// labels by brute-force recursion (no memo, no multiplicity shortcut).
Rational brute_pairings(const GaussianFamily<Rational>& fam, std::vector<std::size_t> labels) {
  if (labels.empty()) return 1;
  if (labels.size() % 2) return 0;
  const std::size_t first = labels[0];
  Rational acc = 0;
  for (std::size_t j = 1; j < labels.size(); ++j) {
    std::vector<std::size_t> rest;
    for (std::size_t t = 1; t < labels.size(); ++t)
      if (t != j) rest.push_back(labels[t]);
    acc += fam.cov(first, labels[j]) * brute_pairings(fam, rest);
  }
  return acc;
}

GaussianFamily<Rational> random_family(std::mt19937_64& rng, std::size_t d) {
  // A A^T for a small random integer A is PSD by construction.
  std::uniform_int_distribution<int> u(-2, 2);
  std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d));
  for (auto& row : a)
    for (auto& x : row) x = u(rng);
  std::vector<std::vector<Rational>> c(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) c[i][j] += a[i][k] * a[j][k];
  return GaussianFamily<Rational>(c);
}

Polynomial<QComplex> poly1(std::initializer_list<std::pair<unsigned, long>> terms) {
  Polynomial<QComplex> p(1);
  for (auto [e, c] : terms) p.add_term({static_cast<std::uint8_t>(e)}, QComplex(Rational(c)));
  return p;
}

}  // namespace

TEST(Isserlis, Examples) {
  auto one = GaussianFamily<Rational>::standard(1);
  auto two = GaussianFamily<Rational>::standard(2);
  EXPECT_EQ(isserlis_moment(one, {4}), Rational(3));
  EXPECT_EQ(isserlis_moment(two, {2, 2}), Rational(1));
  EXPECT_EQ(isserlis_moment(two, {3, 2}), Rational(0));
  EXPECT_THROW(isserlis_moment(two, {-1, 2}), std::domain_error);
}

TEST(Isserlis, DoubleFactorialCount) {
  auto fam = GaussianFamily<Rational>::standard(1);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_EQ(isserlis_moment(fam, {2 * k}), double_factorial_odd(k));
    WickOracle<Rational> general(fam, false);
    EXPECT_EQ(general.moment({static_cast<std::uint8_t>(2 * k)}), double_factorial_odd(k));
  }
}

TEST(Isserlis, MatchesBruteForcePairings) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t d = 1 + trial % 3;
    auto fam = random_family(rng, d);
    std::uniform_int_distribution<int> e(0, 3);
    std::vector<int> k(d);
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < d; ++i) {
      k[i] = e(rng);
      for (int t = 0; t < k[i]; ++t) labels.push_back(i);
    }
    EXPECT_EQ(isserlis_moment(fam, k), brute_pairings(fam, labels));
  }
}

TEST(Isserlis, DiagonalShortcutAgreesWithPairing) {
  std::vector<std::vector<Rational>> c{{2, 0, 0}, {0, make_rational(1, 3), 0}, {0, 0, 5}};
  GaussianFamily<Rational> fam(c);
  WickOracle<Rational> fast(fam, true), slow(fam, false);
  for (unsigned a = 0; a <= 6; ++a)
    for (unsigned b = 0; b <= 4; ++b)
      for (unsigned d = 0; d <= 4; ++d) {
        Exponents k{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(d)};
        EXPECT_EQ(fast.moment(k), slow.moment(k));
      }
}

TEST(GaussianFamily, Validation) {
  using R = Rational;
  EXPECT_THROW(GaussianFamily<R>({{1, 2}, {2, 1}}), std::domain_error);  // eigenvalue -1
  EXPECT_THROW(GaussianFamily<R>({{1, 0}, {1, 1}}), std::domain_error);
  EXPECT_THROW(GaussianFamily<R>({{1, 0}}), ShapeError);
  EXPECT_NO_THROW(GaussianFamily<R>({{1, 1}, {1, 1}}));  // singular but PSD
  EXPECT_THROW(GaussianFamily<R>({{0, 1}, {1, 0}}), std::domain_error);
  EXPECT_NO_THROW(GaussianFamily<double>({{1.0, 0.5}, {0.5, 0.25}}));
  EXPECT_THROW(GaussianFamily<double>({{1.0, 0.0}, {0.0, -1e-6}}), std::domain_error);
  EXPECT_NO_THROW(GaussianFamily<double>({{1.0, 0.0}, {0.0, -1e-12}}));
}

TEST(Expect, Examples) {
  auto one = GaussianFamily<Rational>::standard(1);
  EXPECT_EQ(expect(one, poly1({{0, 7}})), QComplex(7));
  EXPECT_EQ(expect(one, poly1({{4, 1}, {2, -6}, {0, 3}})), QComplex(0));  // H_4
  // (x^2 + y^2 - 2)^2 with x, y independent
  auto two = GaussianFamily<Rational>::standard(2);
  auto x = Polynomial<QComplex>::variable(2, 0), y = Polynomial<QComplex>::variable(2, 1);
  auto q = x * x + y * y - Polynomial<QComplex>::constant(2, QComplex(2));
  EXPECT_EQ(expect(two, q * q), QComplex(4));
  EXPECT_THROW(expect(one, q), ShapeError);
  EXPECT_THROW(expect(one, poly1({{17, 1}})), BudgetExceeded);
}

TEST(Expect, Linearity) {
  std::mt19937_64 rng(5);
  auto fam = random_family(rng, 3);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5), ex(0, 3);
  auto random_poly = [&] {
    Polynomial<QComplex> p(3);
    for (int t = 0; t < 6; ++t)
      p.add_term({static_cast<std::uint8_t>(ex(rng)), static_cast<std::uint8_t>(ex(rng)), static_cast<std::uint8_t>(ex(rng))},
                 QComplex(make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng))));
    return p;
  };
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_poly(), g = random_poly();
    QComplex a(make_rational(num(rng), den(rng)), make_rational(num(rng), 1)), b(make_rational(num(rng), den(rng)));
    EXPECT_EQ(expect(fam, f * a + g * b), a * expect(fam, f) + b * expect(fam, g));
  }
}

TEST(ExpectComplex, Examples) {
  auto zz = zeta_poly(BiPoly<Rational>::monomial(BiForm::z_zbar, 1, 1, QComplex(1)), 0, 1);
  EXPECT_EQ(expect_complex(zz), QComplex(2));
  auto j12 = zeta_poly(complex_hermite(1, 2), 0, 1);
  auto j12c = zeta_poly(complex_hermite(1, 2).conjugate(), 0, 1);
  EXPECT_EQ(expect_complex(j12 * j12c), QComplex(16));
  auto j10 = zeta_poly(complex_hermite(1, 0), 0, 1);
  auto j01c = zeta_poly(complex_hermite(0, 1).conjugate(), 0, 1);
  EXPECT_EQ(expect_complex(j10 * j01c), QComplex(0));
  auto z4 = zeta_poly(BiPoly<Rational>::monomial(BiForm::z_zbar, 2, 2, QComplex(1)), 0, 1);
  EXPECT_EQ(expect_complex(z4), QComplex(8));
}

TEST(ExpectComplex, OrthogonalitySweep) {
  std::vector<std::pair<unsigned, unsigned>> idx;
  for (unsigned m = 0; m <= 4; ++m)
    for (unsigned n = 0; m + n <= 4; ++n) idx.emplace_back(m, n);
  for (auto [m1, n1] : idx)
    for (auto [m2, n2] : idx) {
      auto a = zeta_poly(complex_hermite(m1, n1), 0, 1);
      auto b = zeta_poly(complex_hermite(m2, n2).conjugate(), 0, 1);
      Rational expect_value = 0;
      if (m1 == m2 && n1 == n2) {
        expect_value = factorial(m1) * factorial(n1);
        for (unsigned t = 0; t < m1 + n1; ++t) expect_value *= 2;
      }
      EXPECT_EQ(expect_complex(a * b), QComplex(expect_value)) << m1 << n1 << m2 << n2;
    }
}

TEST(ExpectComplex, CorrelatedPairMatchesClosedForm) {
  // zeta_1, zeta_2 built from a correlated 4-dim family; compare against
  // m! n! (E zeta_1 zeta_2bar)^m (E zeta_1bar zeta_2)^n for matching indices.
  using R = Rational;
  // coordinates: x1, x2, y1, y2 with corr(x1,x2)=corr(y1,y2)=1/2, corr(x1,y2)=1/4, corr(y1,x2)=-1/4
  R h = make_rational(1, 2), q = make_rational(1, 4);
  GaussianFamily<R> fam({{1, h, 0, q}, {h, 1, -q, 0}, {0, -q, 1, h}, {q, 0, h, 1}});
  ComplexCoords map{{0, 1}, {2, 3}};
  auto z1 = Polynomial<QComplex>::variable(4, 0), z2 = Polynomial<QComplex>::variable(4, 1);
  auto z1b = Polynomial<QComplex>::variable(4, 2), z2b = Polynomial<QComplex>::variable(4, 3);
  const QComplex c12 = expect_complex(fam, z1 * z2b, map);
  const QComplex c21 = expect_complex(fam, z1b * z2, map);
  EXPECT_EQ(expect_complex(fam, z1 * z2, map), QComplex(0));  // circular symmetry
  for (unsigned m1 = 0; m1 <= 2; ++m1)
    for (unsigned n1 = 0; n1 <= 2; ++n1)
      for (unsigned m2 = 0; m2 <= 2; ++m2)
        for (unsigned n2 = 0; n2 <= 2; ++n2) {
          auto a = zeta_poly(complex_hermite(m1, n1), 0, 2);
          auto b = zeta_poly(complex_hermite(m2, n2).conjugate(), 1, 2);
          QComplex want(0);
          if (m1 == m2 && n1 == n2) {
            want = QComplex(factorial(m1) * factorial(n1));
            for (unsigned t = 0; t < m1; ++t) want *= c12;
            for (unsigned t = 0; t < n1; ++t) want *= c21;
          }
          EXPECT_EQ(expect_complex(fam, a * b, map), want);
        }
}
