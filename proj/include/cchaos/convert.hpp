#pragma once

// Basis changes between real Hermite products H_k(x) H_{l-k}(y) and complex
// Hermite polynomials J_{m,l-m}(x + iy), the Hermite rotation identity, and
// the angle matrix M used to recover products from rotated H_n.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cchaos/combinatorics.hpp"
#include "cchaos/errors.hpp"
#include "cchaos/hermite.hpp"
#include "cchaos/number.hpp"

namespace cchaos {

enum class Direction { complex_to_real, real_to_complex };

/// Dense coefficient table at a fixed degree n.
///
/// complex_to_real: J_{m,n-m}(z) = sum_k at(m, k) H_k(x) H_{n-k}(y).
/// real_to_complex: H_k(x) H_{n-k}(y) = sum_m at(k, m) J_{m,n-m}(z).
struct ConversionTable {
  unsigned degree = 0;
  Direction direction = Direction::complex_to_real;
  std::vector<std::vector<QComplex>> coef;

  const QComplex& at(unsigned row, unsigned col) const { return coef.at(row).at(col); }
};

struct H2JTables {
  ConversionTable complex_to_real;
  ConversionTable real_to_complex;
};

inline H2JTables h2j_table(unsigned n) {
  H2JTables t;
  t.complex_to_real = {n, Direction::complex_to_real, std::vector<std::vector<QComplex>>(n + 1, std::vector<QComplex>(n + 1))};
  t.real_to_complex = {n, Direction::real_to_complex, std::vector<std::vector<QComplex>>(n + 1, std::vector<QComplex>(n + 1))};
  for (unsigned m = 0; m <= n; ++m)
    for (unsigned k = 0; k <= n; ++k) {
      Rational s = 0;
      for (unsigned r = 0; r <= k; ++r) {
        const unsigned q = k - r;
        const Rational term = binomial(m, r) * binomial(n - m, q);
        s += ((n - m - q) % 2 == 0) ? term : Rational(-term);
      }
      t.complex_to_real.coef[m][k] = i_pow<Rational>(static_cast<int>(n - k)) * s;
    }
  Rational two_n = 1;
  for (unsigned j = 0; j < n; ++j) two_n *= 2;
  for (unsigned k = 0; k <= n; ++k)
    for (unsigned m = 0; m <= n; ++m) {
      Rational s = 0;
      for (unsigned r = 0; r <= m; ++r) {
        const unsigned q = m - r;
        const Rational term = binomial(k, r) * binomial(n - k, q);
        s += (q % 2 == 0) ? term : Rational(-term);
      }
      t.real_to_complex.coef[k][m] = i_pow<Rational>(static_cast<int>(n - k)) * Rational(s / two_n);
    }
  return t;
}

/// Product of two tables, row-major: (a * b)[i][j] = sum_t a[i][t] b[t][j].
inline std::vector<std::vector<QComplex>> compose(const ConversionTable& a, const ConversionTable& b) {
  if (a.degree != b.degree) throw ShapeError("tables of different degree");
  const unsigned n = a.degree;
  std::vector<std::vector<QComplex>> out(n + 1, std::vector<QComplex>(n + 1));
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = 0; j <= n; ++j)
      for (unsigned t = 0; t <= n; ++t) out[i][j] += a.coef[i][t] * b.coef[t][j];
  return out;
}

/// C(n,l) cos^l sin^{n-l} for l = 0..n, the coefficients of
/// H_n(x cos + y sin) on H_l(x) H_{n-l}(y).
template <class T>
std::vector<T> rotation_expand(unsigned n, const T& cos_theta, const T& sin_theta) {
  std::vector<T> out;
  out.reserve(n + 1);
  for (unsigned l = 0; l <= n; ++l) {
    T v = from_rational<T>(binomial(n, l));
    for (unsigned j = 0; j < l; ++j) v *= cos_theta;
    for (unsigned j = l; j < n; ++j) v *= sin_theta;
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<double> rotation_expand(unsigned n, double theta) {
  return rotation_expand<double>(n, std::cos(theta), std::sin(theta));
}

// ---- angle grids ----------------------------------------------------------

/// Angles pi > theta_0 > theta_1 > ... > theta_n > 0.
class ThetaGrid {
 public:
  explicit ThetaGrid(std::vector<double> angles) : theta_(std::move(angles)) {
    if (theta_.empty()) throw ShapeError("angle grid needs at least one angle");
    for (std::size_t k = 0; k < theta_.size(); ++k) {
      if (!(theta_[k] > 0.0 && theta_[k] < std::numbers::pi)) throw std::domain_error("grid angle outside (0, pi)");
      if (k > 0 && !(theta_[k] < theta_[k - 1])) throw std::domain_error("grid angles must be strictly decreasing");
    }
  }

  /// theta_k = pi (n + 1 - k) / (n + 2).
  static ThetaGrid default_grid(unsigned n) {
    std::vector<double> a;
    for (unsigned k = 0; k <= n; ++k) a.push_back(std::numbers::pi * (n + 1 - k) / (n + 2));
    return ThetaGrid(std::move(a));
  }

  unsigned degree() const { return static_cast<unsigned>(theta_.size() - 1); }
  double theta(unsigned k) const { return theta_.at(k); }
  double cos(unsigned k) const { return std::cos(theta_.at(k)); }
  double sin(unsigned k) const { return std::sin(theta_.at(k)); }
  const std::vector<double>& angles() const { return theta_; }

 private:
  std::vector<double> theta_;
};

/// Grid whose cosines and sines are rational: theta = 2 atan(t) for rational t > 0,
/// so cos = (1 - t^2) / (1 + t^2) and sin = 2t / (1 + t^2).
class ExactThetaGrid {
 public:
  static ExactThetaGrid from_half_tangents(const std::vector<Rational>& t) {
    ExactThetaGrid g;
    for (const auto& x : t) {
      const Rational d = 1 + x * x;
      g.cos_.push_back(Rational((1 - x * x) / d));
      g.sin_.push_back(Rational(2 * x / d));
    }
    g.validate();
    return g;
  }

  static ExactThetaGrid from_cos_sin(std::vector<Rational> c, std::vector<Rational> s) {
    ExactThetaGrid g;
    g.cos_ = std::move(c);
    g.sin_ = std::move(s);
    g.validate();
    return g;
  }

  /// n + 1 angles with half-tangents 2(n+1-k)/(n+2), k = 0..n.
  static ExactThetaGrid standard(unsigned n) {
    std::vector<Rational> t;
    for (unsigned k = 0; k <= n; ++k) t.push_back(make_rational(2 * static_cast<long>(n + 1 - k), n + 2));
    return from_half_tangents(t);
  }

  unsigned degree() const { return static_cast<unsigned>(cos_.size() - 1); }
  const Rational& cos(unsigned k) const { return cos_.at(k); }
  const Rational& sin(unsigned k) const { return sin_.at(k); }

  ThetaGrid to_floating() const {
    std::vector<double> a;
    for (std::size_t k = 0; k < cos_.size(); ++k) a.push_back(std::atan2(sin_[k].get_d(), cos_[k].get_d()));
    return ThetaGrid(std::move(a));
  }

 private:
  void validate() const {
    if (cos_.empty() || cos_.size() != sin_.size()) throw ShapeError("angle grid needs matching cos/sin lists");
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      if (cos_[k] * cos_[k] + sin_[k] * sin_[k] != 1) throw std::domain_error("cos^2 + sin^2 != 1 on grid");
      if (sgn(sin_[k]) <= 0) throw std::domain_error("grid angle outside (0, pi)");
      // on (0, pi) the angle decreases exactly when the cosine increases
      if (k > 0 && !(cos_[k] > cos_[k - 1])) throw std::domain_error("grid angles must be strictly decreasing");
    }
  }

  std::vector<Rational> cos_, sin_;
};

// ---- the matrix M ---------------------------------------------------------

/// M[k][l] = C(n,l) sin(theta_k)^{n-l} cos(theta_k)^l with its LU inverse.
struct MatrixM {
  unsigned n = 0;
  Eigen::MatrixXd m;
  Eigen::MatrixXd inverse;
  double det_lu = 0;
  double det_closed_form = 0;
  double residual = 0;  // ||M M^{-1} - I||_inf

  /// Row = grid index k, column = power l of cos.
  double entry(unsigned k, unsigned l) const { return m(k, l); }
  /// (M^{-1})_{l,k}: weight of H_n(x cos theta_k + y sin theta_k) in H_l(x) H_{n-l}(y).
  double inv(unsigned l, unsigned k) const { return inverse(l, k); }
};

/// prod_k C(n,k) prod_{i<j} sin(theta_i - theta_j).
inline double det_M_closed_form(const ThetaGrid& g) {
  const unsigned n = g.degree();
  double d = 1;
  for (unsigned k = 0; k <= n; ++k) d *= binomial(n, k).get_d();
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = i + 1; j <= n; ++j) d *= std::sin(g.theta(i) - g.theta(j));
  return d;
}

inline MatrixM build_M(const ThetaGrid& g, double residual_bound = 1e-10) {
  MatrixM out;
  const unsigned n = out.n = g.degree();
  out.m.resize(n + 1, n + 1);
  for (unsigned k = 0; k <= n; ++k)
    for (unsigned l = 0; l <= n; ++l)
      out.m(k, l) = binomial(n, l).get_d() * std::pow(g.sin(k), n - l) * std::pow(g.cos(k), l);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(out.m);
  out.det_lu = lu.determinant();
  out.det_closed_form = det_M_closed_form(g);
  out.inverse = lu.inverse();
  const Eigen::MatrixXd r = out.m * out.inverse - Eigen::MatrixXd::Identity(n + 1, n + 1);
  out.residual = r.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(out.residual <= residual_bound))
    throw IllConditioned("angle matrix residual " + std::to_string(out.residual) + " exceeds bound; grid angles too close");
  return out;
}

namespace detail {

// Gauss-Jordan over an exact field; throws if singular.
template <class T>
std::vector<std::vector<T>> exact_inverse(std::vector<std::vector<T>> a, T* det_out = nullptr) {
  const std::size_t n = a.size();
  std::vector<std::vector<T>> inv(n, std::vector<T>(n, from_rational<T>(Rational(0))));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = from_rational<T>(Rational(1));
  T det = from_rational<T>(Rational(1));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && cchaos::is_zero(a[p][c])) ++p;
    if (p == n) throw IllConditioned("matrix is singular");
    if (p != c) {
      std::swap(a[p], a[c]);
      std::swap(inv[p], inv[c]);
      det = -det;
    }
    const T piv = a[c][c];
    det *= piv;
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || cchaos::is_zero(a[r][c])) continue;
      const T f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  if (det_out) *det_out = det;
  return inv;
}

}  // namespace detail

/// Exact M and M^{-1} for a rational-trigonometric grid.
struct ExactMatrixM {
  unsigned n = 0;
  std::vector<std::vector<Rational>> m;
  std::vector<std::vector<Rational>> inverse;
  Rational det;
  Rational det_closed_form;

  const Rational& entry(unsigned k, unsigned l) const { return m.at(k).at(l); }
  const Rational& inv(unsigned l, unsigned k) const { return inverse.at(l).at(k); }
};

inline ExactMatrixM build_M(const ExactThetaGrid& g) {
  ExactMatrixM out;
  const unsigned n = out.n = g.degree();
  out.m.assign(n + 1, std::vector<Rational>(n + 1));
  for (unsigned k = 0; k <= n; ++k) {
    auto row = rotation_expand<Rational>(n, g.cos(k), g.sin(k));
    for (unsigned l = 0; l <= n; ++l) out.m[k][l] = row[l];
  }
  out.inverse = detail::exact_inverse(out.m, &out.det);
  Rational d = 1;
  for (unsigned k = 0; k <= n; ++k) d *= binomial(n, k);
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = i + 1; j <= n; ++j) d *= g.sin(i) * g.cos(j) - g.cos(i) * g.sin(j);
  out.det_closed_form = d;
  return out;
}

// ---- d_k and c~_i ---------------------------------------------------------

/// d_k = 2^{-n} sum_{r+s=k} (-1)^s sum_l C(n,l) C(l,r) C(n-l,s) cos^l (i sin)^{n-l},
/// so that H_n(x cos + y sin) = sum_k d_k J_{k,n-k}(x + iy).
template <class T>
std::vector<Complex<T>> dk_coeffs(unsigned n, const T& cos_theta, const T& sin_theta) {
  using C = Complex<T>;
  const C isin{from_rational<T>(Rational(0)), sin_theta};
  std::vector<C> cpow{from_rational<C>(Rational(1))}, spow{from_rational<C>(Rational(1))};
  for (unsigned j = 0; j < n; ++j) {
    cpow.push_back(cpow.back() * C(cos_theta));
    spow.push_back(spow.back() * isin);
  }
  Rational two_n = 1;
  for (unsigned j = 0; j < n; ++j) two_n *= 2;
  const T inv_two_n = from_rational<T>(Rational(1 / two_n));
  std::vector<C> d;
  for (unsigned k = 0; k <= n; ++k) {
    C acc = from_rational<C>(Rational(0));
    for (unsigned r = 0; r <= k; ++r) {
      const unsigned s = k - r;
      for (unsigned l = 0; l <= n; ++l) {
        Rational w = binomial(n, l) * binomial(l, r) * binomial(n - l, s);
        if (sgn(w) == 0) continue;
        if (s % 2) w = -w;
        acc += cpow[l] * spow[n - l] * from_rational<T>(w);
      }
    }
    d.push_back(acc * inv_two_n);
  }
  return d;
}

inline std::vector<std::complex<double>> dk_coeffs(unsigned n, double theta) {
  std::vector<std::complex<double>> out;
  for (const auto& c : dk_coeffs<double>(n, std::cos(theta), std::sin(theta))) out.push_back(to_std(c));
  return out;
}

/// c_j: J_{k,n-k}(x + iy) = sum_j c_j H_j(x) H_{n-j}(y), with prefactor i^{n-j}.
inline std::vector<QComplex> j_to_real_row(unsigned n, unsigned k) {
  if (k > n) throw std::out_of_range("J index beyond degree");
  return h2j_table(n).complex_to_real.coef[k];
}

/// c~_i = sum_j M^{-1}_{j,i} c_j, so that
/// J_{k,n-k}(x + iy) = sum_i c~_i H_n(x cos theta_i + y sin theta_i).
inline std::vector<std::complex<double>> ci_coeffs(unsigned n, unsigned k, const ThetaGrid& g) {
  if (g.degree() != n) throw ShapeError("grid degree does not match n");
  const auto c = j_to_real_row(n, k);
  const MatrixM M = build_M(g);
  std::vector<std::complex<double>> out(n + 1);
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = 0; j <= n; ++j) out[i] += M.inv(j, i) * to_std(c[j]);
  return out;
}

inline std::vector<QComplex> ci_coeffs(unsigned n, unsigned k, const ExactThetaGrid& g) {
  if (g.degree() != n) throw ShapeError("grid degree does not match n");
  const auto c = j_to_real_row(n, k);
  const ExactMatrixM M = build_M(g);
  std::vector<QComplex> out(n + 1);
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = 0; j <= n; ++j) out[i] += c[j] * M.inv(j, i);
  return out;
}

}  // namespace cchaos
