#include <gtest/gtest.h>

#include <cmath>

#include "cchaos/fourth_moment.hpp"

using namespace cchaos;

namespace {

using QS = Complex<QSqrt2>;

QS q(long v) { return {QSqrt2(v), QSqrt2(0)}; }

ChaosVariable single_e1() {
  ComplexKernel<Rational> e1(1, 0, 1);
  e1.set({0}, {}, QComplex(1));
  return {{e1}, Rational(1)};
}

MomentReport fake_report(std::complex<double> abs2, std::complex<double> sq, std::complex<double> abs4,
                         std::complex<double> fourth, double se = 0) {
  MomentReport r;
  r[Quantity::abs2] = {abs2, se};
  r[Quantity::sq] = {sq, se};
  r[Quantity::abs4] = {abs4, se};
  r[Quantity::fourth] = {fourth, se};
  r[Quantity::t3] = {0.0, se};
  return r;
}

const QuantityVerdict& find(const Verdict& v, Quantity q) {
  for (const auto& x : v.quantities)
    if (x.target.q == q) return x;
  throw std::logic_error("quantity missing");
}

}  // namespace

TEST(BlockKernel, ExamplesThroughOracle) {
  auto F = gen_block_kernel(1, 2, 1);
  EXPECT_EQ(F.dim(), 1u);
  auto m = exact_moments(F);
  EXPECT_EQ(m.scaled(Quantity::abs2), q(2));
  EXPECT_TRUE(is_zero(m.sq));
  for (std::size_t k : {2, 3}) {
    auto mk = exact_moments(gen_block_kernel(1, 2, k));
    EXPECT_EQ(mk.scaled(Quantity::abs2), q(2));
    EXPECT_TRUE(is_zero(mk.sq));
  }
  // (1,1): F = J_{1,1}/2 is real, so E[F^2] = E|F|^2
  auto r = exact_moments(gen_block_kernel(1, 1, 1));
  EXPECT_EQ(r.abs2, r.sq);
  EXPECT_EQ(r.abs2, q(1));
  EXPECT_THROW(gen_block_kernel(1, 0, 3), std::invalid_argument);
  EXPECT_THROW(gen_block_kernel(1, 1, 0), std::invalid_argument);
}

TEST(BlockKernel, FourthMomentIsAffineInInverseK) {
  // i.i.d. blocks: E|F_k|^4 = 2 sigma^4 + c / k with c fixed by k = 1
  for (auto [m, n] : {std::pair{1u, 2u}, std::pair{2u, 0u}, std::pair{3u, 1u}}) {
    const auto e1 = exact_moments(gen_block_kernel(m, n, 1));
    const QSqrt2 s4 = e1.abs2.re * e1.abs2.re;
    const QSqrt2 c = e1.abs4.re - QSqrt2(2) * s4;
    EXPECT_FALSE(c.to_double() < 0);
    for (std::size_t k : {2, 4}) {
      if (m + n == 4 && k == 4) continue;  // keep the oracle cheap
      const auto ek = exact_moments(gen_block_kernel(m, n, k));
      EXPECT_EQ(ek.scaled(Quantity::abs4).re, QSqrt2(2) * s4 + c * QSqrt2(Rational(1, static_cast<unsigned long>(k))))
          << m << n << " k=" << k;
    }
  }
}

TEST(BlockKernel, NonnegativityGaps) {
  for (auto [m, n] : {std::pair{1u, 2u}, std::pair{1u, 1u}, std::pair{2u, 0u}, std::pair{3u, 0u}, std::pair{2u, 2u}})
    for (std::size_t k : {1, 2, 3}) {
      const auto F = gen_block_kernel(m, n, k);
      auto [u, v] = decompose(F.parts.front());
      const QSqrt2 eu2 = QSqrt2(factorial(m + n)) * norm2(u), ev2 = QSqrt2(factorial(m + n)) * norm2(v);
      EXPECT_GE((prod_moment(u, u) - QSqrt2(3) * eu2 * eu2).to_double(), -1e-12);
      EXPECT_GE((prod_moment(v, v) - QSqrt2(3) * ev2 * ev2).to_double(), -1e-12);
      EXPECT_GE((prod_moment(u, v) - eu2 * ev2).to_double(), -1e-12);
      // E|G|^4 = E U^4 + 2 E U^2 V^2 + E V^4 for the unscaled G = U + iV
      const auto ex = exact_moments({F.parts, Rational(1)});
      EXPECT_EQ(ex.abs4.re, prod_moment(u, u) + QSqrt2(2) * prod_moment(u, v) + prod_moment(v, v));
    }
}

TEST(ExactMoments, T3OfRealVariableIsFourThirdMoments) {
  // m = n = 1 block sums are real; T3 = E[F^3 + 3 F^2 F] = 4 E[F^3]
  for (std::size_t k : {1, 2}) {
    const auto F = gen_block_kernel(1, 1, k);
    const auto m = exact_moments(F);
    const auto G = gauss_poly(F);
    const QS third = exact_moment(G * G * G);
    EXPECT_EQ(m.t3, third * q(4));
    EXPECT_TRUE(is_zero(m.t3.im));
  }
  EXPECT_THROW(exact_moments(gen_block_kernel(3, 2, 1)), BudgetExceeded);
}

TEST(ExactMoments, ReportMatchesOracleWithZeroError) {
  const auto F = gen_block_kernel(2, 1, 2);
  const auto m = exact_moments(F);
  const auto r = exact_report(m);
  EXPECT_TRUE(r.exact);
  for (auto qq : kQuantities) EXPECT_EQ(r[qq].stderr_, 0.0);
  const auto G = gauss_poly(F);
  const auto Gb = G.map_coefficients([](const QS& c) { return conj(c); });
  EXPECT_NEAR(r[Quantity::abs2].value.real(), to_std(exact_moment(G * Gb)).real() / 2, 1e-12);
  EXPECT_NEAR(r[Quantity::abs4].value.real(), to_std(exact_moment(G * Gb * G * Gb)).real() / 4, 1e-12);
}

TEST(MonteCarlo, FirstChaosVariance) {
  const auto r = estimate(single_e1(), 1000000, 2024, 4);
  EXPECT_LE(std::abs(r[Quantity::abs2].value - 1.0), 5 * r[Quantity::abs2].stderr_);
  EXPECT_GT(r[Quantity::abs2].stderr_, 0);
  EXPECT_EQ(r.N, 1000000u);
}

TEST(MonteCarlo, BlockKernelFourthMomentMatchesOracle) {
  const auto F = gen_block_kernel(1, 2, 1);
  const auto m = exact_moments(F);
  const auto r = estimate(F, 1000000, 7, 4);
  for (auto qq : kQuantities)
    EXPECT_LE(std::abs(r[qq].value - m.value(qq)), 5 * r[qq].stderr_ + 1e-12) << quantity_name(qq);
}

TEST(MonteCarlo, FiveStandardErrorsOverSeeds) {
  const auto F = gen_block_kernel(1, 1, 2);
  const auto m = exact_moments(F);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = estimate(F, 4000, seed);
    bool ok = true;
    for (auto qq : kQuantities)
      if (std::abs(r[qq].value - m.value(qq)) > 5 * r[qq].stderr_) ok = false;
    hits += ok;
  }
  EXPECT_GE(hits, 99);
}

TEST(MonteCarlo, IdenticalAcrossWorkerCounts) {
  const auto F = gen_block_kernel(1, 2, 8);
  std::vector<std::complex<double>> v1, v3;
  const auto a = estimate(F, 20000, 5, 1, &v1);
  const auto b = estimate(F, 20000, 5, 3, &v3);
  const auto c = estimate(F, 20000, 5, 8);
  for (auto qq : kQuantities) {
    EXPECT_EQ(a[qq].value, b[qq].value);
    EXPECT_EQ(a[qq].stderr_, b[qq].stderr_);
    EXPECT_EQ(a[qq].value, c[qq].value);
  }
  EXPECT_EQ(v1, v3);
  EXPECT_THROW(estimate(F, 1, 5), std::invalid_argument);
}

TEST(SampleStats, MergeMatchesSinglePass) {
  SampleStats all, left, right;
  for (int i = 0; i < 100; ++i) {
    const std::complex<double> x(std::sin(i), std::cos(3 * i) + 0.1 * i);
    all.push(x);
    (i < 37 ? left : right).push(x);
  }
  left.merge(right);
  EXPECT_NEAR(std::abs(left.mean - all.mean), 0, 1e-13);
  EXPECT_NEAR(left.m2, all.m2, 1e-10);
}

TEST(Targets, GaussianCases) {
  auto off = targets(Case::gaussian_offdiag, 2, 0, 0);
  EXPECT_EQ(off[2].value, std::complex<double>(8));
  EXPECT_EQ(off[2].role, Role::criterion);
  auto diag = targets(Case::gaussian_diag, 2, 0.5, 0.25);
  EXPECT_NEAR(diag[2].value.real(), (0.25 + 0.0625 + 2) * 4, 1e-14);
  auto deg = targets(Case::gaussian_degenerate, 1, 1, 0);
  EXPECT_EQ(deg[2].value, std::complex<double>(3));
  EXPECT_EQ(deg[3].value, std::complex<double>(3));
  EXPECT_EQ(deg[3].role, Role::criterion);
}

TEST(Targets, ChiSquareDefaultsReproduceStatedLimits) {
  for (double a : {0.0, 0.3, -0.5})
    for (double s2 : {1.0, 2.0, 5.0}) {
      const auto tag = a == 0 ? Case::chi2_offdiag : Case::chi2_diag;
      for (const auto& t : targets(tag, s2, a, 0)) {
        if (!t.stated) continue;
        EXPECT_NEAR(std::abs(t.value - *t.stated), 0, 1e-12) << quantity_name(t.q);
      }
    }
  // the literal dof (1 +- a) sigma^2 / 2 gives a different law; targets follow the configuration
  const auto lit = targets(Case::chi2_offdiag, 2, 0, 0, std::array<double, 2>{1, 1});
  EXPECT_EQ(lit[0].value, std::complex<double>(4));
  EXPECT_NE(lit[2].value, *lit[2].stated);
}

TEST(Criterion, Validation) {
  CriterionSpec chi{Case::chi2_offdiag, 2, {}, {}, {}};
  EXPECT_THROW(validate_criterion(chi, 3, false), CriterionError);
  try {
    validate_criterion(chi, 3, false);
  } catch (const CriterionError& e) {
    EXPECT_NE(std::string(e.what()).find("odd"), std::string::npos);
  }
  EXPECT_NO_THROW(validate_criterion(chi, 4, false));
  EXPECT_THROW(validate_criterion({Case::gaussian_offdiag, 2, {}, {}, {}}, 2, true), CriterionError);
  EXPECT_THROW(validate_criterion({Case::gaussian_diag, 2, 0.9, 0.9, {}}, 2, true), CriterionError);
  EXPECT_THROW(validate_criterion({Case::gaussian_diag, -1, {}, {}, {}}, 2, true), CriterionError);
  EXPECT_THROW(validate_criterion({Case::chi2_diag, 2, 0.1, 0.2, {}}, 2, true), CriterionError);
  EXPECT_THROW(validate_degrees({2, 3, 2}), CriterionError);
  EXPECT_NO_THROW(validate_degrees({2, 4}));
}

TEST(Verdict, OffDiagonalOracleTrajectory) {
  std::vector<std::size_t> ks{1, 2, 4};
  std::vector<MomentReport> reps;
  for (auto k : ks) reps.push_back(exact_report(exact_moments(gen_block_kernel(1, 2, k))));
  const auto v = verdict(ks, reps, {Case::gaussian_offdiag, 2, {}, {}, {}}, 3, false);
  const auto& a4 = find(v, Quantity::abs4);
  EXPECT_TRUE(a4.nonincreasing);
  EXPECT_FALSE(a4.pass_at.back());  // 50 is not 8 yet
  EXPECT_FALSE(v.pass);
  EXPECT_TRUE(find(v, Quantity::abs2).pass);
  // a trajectory that does reach the target
  std::vector<MomentReport> conv{fake_report(2, 0, 12, 0), fake_report(2, 0, 9, 0), fake_report(2, 0, 8.05, 0)};
  EXPECT_TRUE(verdict(ks, conv, {Case::gaussian_offdiag, 2, {}, {}, {}}, 3, false).pass);
  // reaching the target but wandering away in between fails the trajectory check
  std::vector<MomentReport> wob{fake_report(2, 0, 9, 0), fake_report(2, 0, 12, 0), fake_report(2, 0, 8.05, 0)};
  EXPECT_FALSE(verdict(ks, wob, {Case::gaussian_offdiag, 2, {}, {}, {}}, 3, false).pass);
}

TEST(Verdict, ToleranceFloorAndNoise) {
  EXPECT_DOUBLE_EQ(verdict_tolerance(0, 8), 0.17);
  EXPECT_DOUBLE_EQ(verdict_tolerance(1, 8), 5);
  std::vector<std::size_t> ks{4, 16};
  std::vector<MomentReport> reps{fake_report(2, 0, 9, 0, 0.3), fake_report(2, 0, 9.2, 0, 0.3)};
  const auto v = verdict(ks, reps, {Case::gaussian_offdiag, 2, {}, {}, {}}, 3, false);
  EXPECT_TRUE(find(v, Quantity::abs4).nonincreasing);
  EXPECT_TRUE(find(v, Quantity::abs4).pass);
  EXPECT_THROW(verdict({4, 4}, reps, {Case::gaussian_offdiag, 2, {}, {}, {}}, 3, false), std::invalid_argument);
}

TEST(Verdict, DegenerateCaseChecksFourthPower) {
  std::vector<std::size_t> ks{1};
  // real F with E F^4 = 3 sigma^4: the classical criterion
  std::vector<MomentReport> reps{fake_report(1, 1, 3, 3)};
  const auto v = verdict(ks, reps, {Case::gaussian_degenerate, 1, 1.0, 0.0, {}}, 2, true);
  EXPECT_EQ(v.resolved, Case::gaussian_degenerate);
  EXPECT_EQ(find(v, Quantity::fourth).target.value, std::complex<double>(3));
  EXPECT_EQ(find(v, Quantity::fourth).target.role, Role::criterion);
  EXPECT_TRUE(v.pass);
  std::vector<MomentReport> bad{fake_report(1, 1, 3, 4)};
  EXPECT_FALSE(verdict(ks, bad, {Case::gaussian_degenerate, 1, 1.0, 0.0, {}}, 2, true).pass);
}

TEST(Verdict, DiagonalRoutesToDegenerateFromEstimates) {
  std::vector<std::size_t> ks{1, 2, 4};
  std::vector<MomentReport> reps;
  for (auto k : ks) reps.push_back(exact_report(exact_moments(gen_block_kernel(1, 1, k))));
  const auto v = verdict(ks, reps, {Case::gaussian_diag, 1, {}, {}, {}}, 2, true);
  EXPECT_EQ(v.resolved, Case::gaussian_degenerate);
  EXPECT_DOUBLE_EQ(v.a, 1);
  EXPECT_DOUBLE_EQ(v.b, 0);
  EXPECT_FALSE(v.note.empty());
  // a genuinely two-dimensional diagonal limit stays in case 2
  std::vector<MomentReport> nd{fake_report(1, std::complex<double>(0.3, 0.1), 2.1, 0)};
  const auto w = verdict({1}, nd, {Case::gaussian_diag, 1, {}, {}, {}}, 2, true);
  EXPECT_EQ(w.resolved, Case::gaussian_diag);
  EXPECT_NEAR(find(w, Quantity::abs4).target.value.real(), 2.1, 1e-12);
  EXPECT_TRUE(w.pass);
}

TEST(Contractions, BlockSumsShrinkLikeInverseRootK) {
  for (auto [m, n] : {std::pair{1u, 2u}, std::pair{1u, 1u}}) {
    const auto [u1, v1] = contraction_norms(gen_block_kernel(m, n, 1));
    const auto [u4, v4] = contraction_norms(gen_block_kernel(m, n, 4));
    EXPECT_GT(u1, 0);
    EXPECT_NEAR(u4, u1 / 2, 1e-12);
    EXPECT_NEAR(v4, v1 / 2, 1e-12);
  }
}

TEST(Multivariate, CrossMomentsAndDegrees) {
  std::vector<ChaosVariable> comps{gen_block_kernel(1, 1, 4), gen_block_kernel(2, 2, 4)};
  const auto r = estimate_joint(comps, 20000, 3, 2);
  ASSERT_EQ(r.components.size(), 2u);
  ASSERT_EQ(r.cross.size(), 1u);
  EXPECT_EQ(r.cross[0].i, 1u);
  EXPECT_EQ(r.cross[0].j, 0u);
  const auto solo = estimate(comps[1], 20000, 3);
  EXPECT_EQ(solo[Quantity::abs4].value, r.components[1][Quantity::abs4].value);
  std::vector<ChaosVariable> same{gen_block_kernel(1, 1, 4), gen_block_kernel(2, 0, 4)};
  EXPECT_THROW(estimate_joint(same, 100, 1), CriterionError);
}

TEST(Ks, NormalSamplesAndMismatch) {
  const std::size_t N = 1000000;
  std::vector<double> x(N);
  NormalStream ns(11);
  for (std::size_t i = 0; i < N; ++i) ns.fill(i, 0, &x[i], 1);
  const auto r = ks_distance(x, normal_cdf_fn(0, 1));
  EXPECT_LT(r.distance, 1.95 / std::sqrt(double(N)));
  EXPECT_FALSE(r.maximal_mismatch);
  const auto c = ks_distance(std::vector<double>(500, 0.0), normal_cdf_fn(0, 1));
  EXPECT_GE(c.distance, 0.5);
  EXPECT_TRUE(c.maximal_mismatch);
  EXPECT_LT(c.p_value, 1e-10);
  EXPECT_THROW(ks_distance(std::vector<double>(99, 0.0), normal_cdf_fn(0, 1)), std::invalid_argument);
  EXPECT_THROW(normal_cdf_fn(0, 0), std::domain_error);
  EXPECT_THROW(centered_chi2_cdf_fn(0), std::domain_error);
}

TEST(Ks, KolmogorovTailAndChiSquareCdf) {
  EXPECT_NEAR(kolmogorov_tail(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 1e-4);
  const auto F = centered_chi2_cdf_fn(2);
  for (double x : {-1.5, 0.0, 1.0, 4.0}) EXPECT_NEAR(F(x), 1 - std::exp(-(x + 2) / 2), 1e-14);
  EXPECT_EQ(F(-2.5), 0.0);
  // squared normals minus one follow the centered chi-square law with one degree of freedom
  std::vector<double> x(20000);
  NormalStream ns(4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ns.fill(i, 0, &x[i], 1);
    x[i] = x[i] * x[i] - 1;
  }
  EXPECT_GT(ks_distance(x, centered_chi2_cdf_fn(1)).p_value, 1e-3);
}
