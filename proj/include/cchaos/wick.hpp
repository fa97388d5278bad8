#pragma once

// Exact Gaussian expectations by Isserlis pairing. Every moment claim in the
// library is ultimately checked against this oracle.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cchaos/combinatorics.hpp"
#include "cchaos/errors.hpp"
#include "cchaos/hermite.hpp"
#include "cchaos/number.hpp"
#include "cchaos/polynomial.hpp"

namespace cchaos {

/// Largest total degree the pairing oracle accepts.
inline constexpr unsigned kWickDegreeBudget = 16;

/// Law of d jointly Gaussian centered real coordinates.
template <class T = Rational>
class GaussianFamily {
 public:
  using Scalar = T;

  explicit GaussianFamily(std::vector<std::vector<T>> cov) : cov_(std::move(cov)) {
    const std::size_t d = cov_.size();
    for (const auto& row : cov_)
      if (row.size() != d) throw ShapeError("covariance matrix is not square");
    validate();
    diagonal_ = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j && !cchaos::is_zero(cov_[i][j])) diagonal_ = false;
  }

  /// d independent unit-variance coordinates.
  static GaussianFamily standard(std::size_t d) {
    std::vector<std::vector<T>> c(d, std::vector<T>(d, from_rational<T>(Rational(0))));
    for (std::size_t i = 0; i < d; ++i) c[i][i] = from_rational<T>(Rational(1));
    return GaussianFamily(std::move(c));
  }

  std::size_t dim() const { return cov_.size(); }
  const T& cov(std::size_t i, std::size_t j) const { return cov_[i][j]; }
  bool is_diagonal() const { return diagonal_; }

 private:
  void validate() const {
    const std::size_t d = cov_.size();
    if constexpr (scalar_traits<T>::exact) {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
          if (cov_[i][j] != cov_[j][i]) throw std::domain_error("covariance matrix is not symmetric");
      if (!exact_psd()) throw std::domain_error("covariance matrix is not positive semidefinite");
    } else {
      constexpr double tol = 1e-10;
      Eigen::MatrixXd m(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = to_double(cov_[i][j]);
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) throw std::domain_error("covariance matrix is not symmetric");
      if (d > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) throw std::domain_error("covariance matrix is not positive semidefinite");
      }
    }
  }

  // Symmetric pivoted elimination over the field: PSD iff every chosen pivot
  // is positive and the leftover block is identically zero.
  bool exact_psd() const {
    auto a = cov_;
    std::vector<bool> done(a.size(), false);
    for (std::size_t step = 0; step < a.size(); ++step) {
      std::size_t p = a.size();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (done[i]) continue;
        if (a[i][i] < 0) return false;
        if (a[i][i] > 0 && (p == a.size() || a[i][i] > a[p][p])) p = i;
      }
      if (p == a.size()) {
        for (std::size_t i = 0; i < a.size(); ++i)
          for (std::size_t j = 0; j < a.size(); ++j)
            if (!done[i] && !done[j] && !cchaos::is_zero(a[i][j])) return false;
        return true;
      }
      done[p] = true;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (done[i] || cchaos::is_zero(a[i][p])) continue;
        const T f = a[i][p] / a[p][p];
        for (std::size_t j = 0; j < a.size(); ++j)
          if (!done[j]) a[i][j] -= f * a[p][j];
      }
    }
    return true;
  }

  std::vector<std::vector<T>> cov_;
  bool diagonal_ = true;
};

/// E[prod_i g_i^{k_i}] with memoisation over exponent vectors.
///
/// One oracle instance may be reused for many monomials of the same family;
/// the memo table is owned by the instance and never shared.
template <class T = Rational>
class WickOracle {
 public:
  explicit WickOracle(const GaussianFamily<T>& fam, bool use_diagonal_shortcut = true)
      : fam_(fam), shortcut_(use_diagonal_shortcut && fam.is_diagonal()) {}

  T moment(const Exponents& k) {
    if (k.size() != fam_.dim()) throw ShapeError("exponent vector does not match family dimension");
    const unsigned deg = total_degree(k);
    if (deg % 2) return zero();
    if (shortcut_) return diagonal_moment(k);
    return pairing(k);
  }

  std::size_t memo_size() const { return memo_.size(); }

 private:
  static T zero() { return from_rational<T>(Rational(0)); }

  T diagonal_moment(const Exponents& k) const {
    T r = from_rational<T>(Rational(1));
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] % 2) return zero();
      if (k[i] == 0) continue;
      r *= from_rational<T>(double_factorial_odd(k[i] / 2u));
      for (unsigned j = 0; j < k[i] / 2u; ++j) r *= fam_.cov(i, i);
    }
    return r;
  }

  // Pair the first remaining factor g_i with every other factor:
  // E[g^k] = sum_j C_ij (k - e_i)_j E[g^{k - e_i - e_j}].
  T pairing(const Exponents& k) {
    const unsigned deg = total_degree(k);
    if (deg == 0) return from_rational<T>(Rational(1));
    if (deg % 2) return zero();
    const std::string key(k.begin(), k.end());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::size_t i = 0;
    while (k[i] == 0) ++i;
    Exponents rest = k;
    --rest[i];
    T acc = zero();
    for (std::size_t j = 0; j < rest.size(); ++j) {
      if (rest[j] == 0 || cchaos::is_zero(fam_.cov(i, j))) continue;
      const long mult = rest[j];
      --rest[j];
      T sub = pairing(rest);
      ++rest[j];
      if (cchaos::is_zero(sub)) continue;
      sub *= fam_.cov(i, j);
      sub *= from_rational<T>(Rational(mult));
      acc += sub;
    }
    memo_.emplace(key, acc);
    return acc;
  }

  const GaussianFamily<T>& fam_;
  bool shortcut_;
  std::unordered_map<std::string, T> memo_;
};

/// E[prod_i g_i^{k_i}]; odd total degree gives 0.
template <class T>
T isserlis_moment(const GaussianFamily<T>& fam, const std::vector<int>& exponents) {
  Exponents k;
  k.reserve(exponents.size());
  for (int e : exponents) {
    if (e < 0) throw std::domain_error("negative exponent in Gaussian monomial");
    if (e > 255) throw BudgetExceeded("exponent too large for the pairing oracle");
    k.push_back(static_cast<std::uint8_t>(e));
  }
  WickOracle<T> oracle(fam);
  return oracle.moment(k);
}

namespace detail {

template <class C, class T>
C lift(const T& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return from_rational<C>(x);
  else
    return C(x);
}

}  // namespace detail

/// Polynomial in the real coordinates of a GaussianFamily.
template <class C = QComplex>
using GaussPoly = Polynomial<C>;

/// E[p] for p a polynomial in the family's coordinates.
template <class C, class T>
C expect(const GaussianFamily<T>& fam, const Polynomial<C>& p, unsigned budget = kWickDegreeBudget) {
  if (p.nvars() != fam.dim()) throw ShapeError("polynomial and Gaussian family have different dimensions");
  if (p.degree() > budget) throw BudgetExceeded("polynomial degree " + std::to_string(p.degree()) + " exceeds the pairing budget " + std::to_string(budget));
  WickOracle<T> oracle(fam);
  C acc = from_rational<C>(Rational(0));
  for (const auto& [e, c] : p.terms()) {
    const T m = oracle.moment(e);
    if (cchaos::is_zero(m)) continue;
    C term = c;
    term *= detail::lift<C>(m);
    acc += term;
  }
  return acc;
}

/// Where the real and imaginary parts of each complex variable live among the
/// family's coordinates: zeta_k = g[re[k]] + i g[im[k]].
struct ComplexCoords {
  std::vector<std::size_t> re;
  std::vector<std::size_t> im;

  /// K complex variables over 2K coordinates, real parts first.
  static ComplexCoords split(std::size_t k) {
    ComplexCoords c;
    for (std::size_t j = 0; j < k; ++j) {
      c.re.push_back(j);
      c.im.push_back(k + j);
    }
    return c;
  }
  std::size_t count() const { return re.size(); }
};

/// Polynomial in zeta_1..zeta_K and their conjugates. Variable k is zeta_k,
/// variable K + k is conj(zeta_k).
template <class C = QComplex>
using ComplexGaussPoly = Polynomial<C>;

/// Embeds a single-variable BiPoly (z, zbar form) as zeta_k in a K-variable polynomial.
template <class T>
Polynomial<Complex<T>> zeta_poly(const BiPoly<T>& p, std::size_t k, std::size_t K) {
  if (k >= K) throw ShapeError("complex variable index out of range");
  return p.to_zzbar().poly().embed(2 * K, {k, K + k});
}

/// Rewrites a polynomial in (zeta, zeta-bar) into the real coordinates.
template <class C>
Polynomial<C> to_real_coords(const Polynomial<C>& p, const ComplexCoords& map, std::size_t dim) {
  const std::size_t K = map.count();
  if (p.nvars() != 2 * K || map.im.size() != K) throw ShapeError("complex polynomial does not match coordinate map");
  for (std::size_t k = 0; k < K; ++k)
    if (map.re[k] >= dim || map.im[k] >= dim) throw ShapeError("coordinate map points outside the family");
  const C one = from_rational<C>(Rational(1));
  const C iu = C::i();
  std::vector<Polynomial<C>> zeta, zeta_bar;
  for (std::size_t k = 0; k < K; ++k) {
    auto x = Polynomial<C>::variable(dim, map.re[k]);
    auto y = Polynomial<C>::variable(dim, map.im[k]);
    zeta.push_back(x + y * iu);
    zeta_bar.push_back(x - y * iu);
  }
  // Cache powers: each monomial needs zeta_k^a zeta_bar_k^b.
  std::vector<std::vector<Polynomial<C>>> zp(K), zbp(K);
  auto power = [&](std::vector<Polynomial<C>>& cache, const Polynomial<C>& base, unsigned e) -> const Polynomial<C>& {
    if (cache.empty()) cache.push_back(Polynomial<C>::constant(dim, one));
    while (cache.size() <= e) cache.push_back(cache.back() * base);
    return cache[e];
  };
  Polynomial<C> out(dim);
  for (const auto& [e, c] : p.terms()) {
    Polynomial<C> term = Polynomial<C>::constant(dim, c);
    for (std::size_t k = 0; k < K; ++k) {
      if (e[k]) term = term * power(zp[k], zeta[k], e[k]);
      if (e[K + k]) term = term * power(zbp[k], zeta_bar[k], e[K + k]);
    }
    out += term;
  }
  return out;
}

/// E[p(zeta, zeta-bar)] where each zeta_k is assembled from two coordinates of fam.
template <class C, class T>
C expect_complex(const GaussianFamily<T>& fam, const Polynomial<C>& p, const ComplexCoords& map,
                 unsigned budget = kWickDegreeBudget) {
  if (p.degree() > budget) throw BudgetExceeded("polynomial degree exceeds the pairing budget");
  return expect(fam, to_real_coords(p, map, fam.dim()), budget);
}

/// Same with the default layout: K complex variables over 2K standard coordinates.
template <class C>
C expect_complex(const Polynomial<C>& p, unsigned budget = kWickDegreeBudget) {
  const std::size_t K = p.nvars() / 2;
  if (p.nvars() != 2 * K) throw ShapeError("complex polynomial needs an even variable count");
  return expect_complex(GaussianFamily<Rational>::standard(2 * K), p, ComplexCoords::split(K), budget);
}

}  // namespace cchaos
