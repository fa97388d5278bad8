#pragma once

// Real Hermite polynomials H_n and complex Hermite polynomials J_{m,n}(z, rho),
// built exactly from their differential-operator definitions, together with
// the complex Ornstein-Uhlenbeck generator A_theta.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "cchaos/combinatorics.hpp"
#include "cchaos/errors.hpp"
#include "cchaos/number.hpp"
#include "cchaos/polynomial.hpp"

namespace cchaos {

/// Which pair of variables a BiPoly is written in.
enum class BiForm {
  z_zbar,  // exponent (a, b) means z^a zbar^b
  x_y,     // exponent (a, b) means x^a y^b, with z = x + i y
};

/// Polynomial in one complex variable and its conjugate, with complex
/// coefficients over the real scalar T.
template <class T = Rational>
class BiPoly {
 public:
  using Scalar = T;
  using Coeff = Complex<T>;

  explicit BiPoly(BiForm form = BiForm::z_zbar) : form_(form), poly_(2) {}
  BiPoly(BiForm form, Polynomial<Coeff> p) : form_(form), poly_(std::move(p)) {
    if (poly_.nvars() != 2) throw ShapeError("BiPoly needs a two-variable polynomial");
  }

  static BiPoly constant(BiForm form, const Coeff& c) { return BiPoly(form, Polynomial<Coeff>::constant(2, c)); }

  static BiPoly monomial(BiForm form, unsigned a, unsigned b, const Coeff& c) {
    BiPoly p(form);
    p.poly_.add_term(Exponents{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)}, c);
    return p;
  }

  BiForm form() const { return form_; }
  const Polynomial<Coeff>& poly() const { return poly_; }

  Coeff coeff(unsigned a, unsigned b) const {
    return poly_.coeff(Exponents{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b)});
  }

  /// Highest exponent of the first and second variable.
  std::pair<unsigned, unsigned> bidegree() const {
    unsigned a = 0, b = 0;
    for (const auto& [e, c] : poly_.terms()) {
      a = std::max<unsigned>(a, e[0]);
      b = std::max<unsigned>(b, e[1]);
    }
    return {a, b};
  }

  BiPoly to_xy() const {
    if (form_ == BiForm::x_y) return *this;
    auto x = Polynomial<Coeff>::variable(2, 0);
    auto y = Polynomial<Coeff>::variable(2, 1);
    auto z = x + y * Coeff::i();
    auto zb = x - y * Coeff::i();
    return BiPoly(BiForm::x_y, substitute(z, zb));
  }

  BiPoly to_zzbar() const {
    if (form_ == BiForm::z_zbar) return *this;
    const Coeff half = from_rational<Coeff>(make_rational(1, 2));
    auto z = Polynomial<Coeff>::variable(2, 0);
    auto zb = Polynomial<Coeff>::variable(2, 1);
    auto x = (z + zb) * half;
    auto y = (z - zb) * (Coeff::i() * half * from_rational<Coeff>(make_rational(-1)));
    return BiPoly(BiForm::z_zbar, substitute(x, y));
  }

  BiPoly in_form(BiForm f) const { return f == BiForm::x_y ? to_xy() : to_zzbar(); }

  /// The polynomial whose values are the complex conjugates of this one's.
  /// In (z, zbar) form conjugation also swaps the exponent pair.
  BiPoly conjugate() const {
    BiPoly out(form_);
    for (const auto& [e, c] : poly_.terms()) {
      Exponents f = form_ == BiForm::z_zbar ? Exponents{e[1], e[0]} : e;
      out.poly_.add_term(std::move(f), cchaos::conj(c));
    }
    return out;
  }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) { return BiPoly(a.form_, a.poly_ + b.same_form(a.form_).poly_); }
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return BiPoly(a.form_, a.poly_ - b.same_form(a.form_).poly_); }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) { return BiPoly(a.form_, a.poly_ * b.same_form(a.form_).poly_); }
  friend BiPoly operator*(const BiPoly& a, const Coeff& s) { return BiPoly(a.form_, a.poly_ * s); }
  friend BiPoly operator*(const Coeff& s, const BiPoly& a) { return BiPoly(a.form_, a.poly_ * s); }
  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.form_ == b.form_ && a.poly_ == b.poly_; }
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

  template <class U>
  BiPoly<U> cast() const {
    return BiPoly<U>(form_, poly_.map_coefficients([](const Coeff& c) {
      if constexpr (std::is_same_v<U, double>)
        return Complex<double>{to_double(c.re), to_double(c.im)};
      else
        return Complex<U>{U(c.re), U(c.im)};
    }));
  }

 private:
  BiPoly same_form(BiForm f) const { return in_form(f); }

  // Replace the two variables by the given polynomials.
  Polynomial<Coeff> substitute(const Polynomial<Coeff>& first, const Polynomial<Coeff>& second) const {
    auto [da, db] = bidegree();
    std::vector<Polynomial<Coeff>> pa{Polynomial<Coeff>::constant(2, Coeff(1))};
    std::vector<Polynomial<Coeff>> pb{Polynomial<Coeff>::constant(2, Coeff(1))};
    for (unsigned k = 1; k <= da; ++k) pa.push_back(pa.back() * first);
    for (unsigned k = 1; k <= db; ++k) pb.push_back(pb.back() * second);
    Polynomial<Coeff> out(2);
    for (const auto& [e, c] : poly_.terms()) out += (pa[e[0]] * pb[e[1]]) * c;
    return out;
  }

  BiForm form_;
  Polynomial<Coeff> poly_;
};

/// Index (m, n, rho) of a complex Hermite polynomial.
struct HermiteIndex {
  unsigned m = 0;
  unsigned n = 0;
  Rational rho = 2;

  HermiteIndex(unsigned m_, unsigned n_, Rational rho_ = 2) : m(m_), n(n_), rho(std::move(rho_)) {
    if (sgn(rho) <= 0) throw std::domain_error("complex Hermite polynomial needs rho > 0");
  }
};

/// Coefficients (ascending powers of x) of H_n(x) = (-1)^n e^{x^2/2} d^n/dx^n e^{-x^2/2}.
inline std::vector<Rational> real_hermite_coeffs(unsigned n) {
  // d^k/dx^k e^{-x^2/2} = P_k(x) e^{-x^2/2} with P_{k+1} = P_k' - x P_k
  std::vector<Rational> p{Rational(1)};
  for (unsigned k = 0; k < n; ++k) {
    std::vector<Rational> next(p.size() + 1, Rational(0));
    for (std::size_t j = 1; j < p.size(); ++j) next[j - 1] += p[j] * static_cast<long>(j);
    for (std::size_t j = 0; j < p.size(); ++j) next[j + 1] -= p[j];
    p = std::move(next);
  }
  if (n % 2 == 1)
    for (auto& c : p) c = -c;
  return p;
}

/// H_n as a BiPoly in x alone.
inline BiPoly<Rational> real_hermite(unsigned n) {
  auto coeffs = real_hermite_coeffs(n);
  BiPoly<Rational> acc(BiForm::x_y);
  for (unsigned j = 0; j < coeffs.size(); ++j)
    if (sgn(coeffs[j]) != 0) acc = acc + BiPoly<Rational>::monomial(BiForm::x_y, j, 0, QComplex(coeffs[j]));
  return acc;
}

/// H_l(x) H_r(y) in x_y form.
inline BiPoly<Rational> hermite_product(unsigned l, unsigned r) {
  return real_hermite(l) * BiPoly<Rational>(BiForm::x_y, real_hermite(r).poly().embed(2, {1, 0}));
}

/// H_n(a x + b y) in x_y form.
template <class T>
BiPoly<T> real_hermite_linear(unsigned n, const T& a, const T& b) {
  using C = Complex<T>;
  auto x = Polynomial<C>::variable(2, 0), y = Polynomial<C>::variable(2, 1);
  std::vector<C> coeffs;
  for (const auto& c : real_hermite_coeffs(n)) coeffs.push_back(from_rational<C>(c));
  return BiPoly<T>(BiForm::x_y, compose(coeffs, x * C(a) + y * C(b)));
}

namespace detail {

// d/dz and d/dzbar on (z, zbar) form, treating z and zbar as independent.
template <class T>
BiPoly<T> d_z(const BiPoly<T>& p) {
  BiPoly<T> out(BiForm::z_zbar);
  for (const auto& [e, c] : p.poly().terms())
    if (e[0] > 0) out = out + BiPoly<T>::monomial(BiForm::z_zbar, e[0] - 1u, e[1], c * Complex<T>(T(static_cast<long>(e[0]))));
  return out;
}

template <class T>
BiPoly<T> d_zbar(const BiPoly<T>& p) {
  BiPoly<T> out(BiForm::z_zbar);
  for (const auto& [e, c] : p.poly().terms())
    if (e[1] > 0) out = out + BiPoly<T>::monomial(BiForm::z_zbar, e[0], e[1] - 1u, c * Complex<T>(T(static_cast<long>(e[1]))));
  return out;
}

}  // namespace detail

/// J_{m,n}(z, rho) = rho^{m+n} (d*)^m (dbar*)^n 1 where
/// d* phi = -d_zbar phi + (z/rho) phi and dbar* phi = -d_z phi + (zbar/rho) phi.
inline BiPoly<Rational> complex_hermite(const HermiteIndex& idx) {
  using P = BiPoly<Rational>;
  const QComplex inv_rho(Rational(1 / idx.rho));
  const P z_over_rho = P::monomial(BiForm::z_zbar, 1, 0, inv_rho);
  const P zb_over_rho = P::monomial(BiForm::z_zbar, 0, 1, inv_rho);
  P phi = P::constant(BiForm::z_zbar, QComplex(1));
  for (unsigned k = 0; k < idx.n; ++k) phi = zb_over_rho * phi - detail::d_z(phi);
  for (unsigned k = 0; k < idx.m; ++k) phi = z_over_rho * phi - detail::d_zbar(phi);
  Rational scale(1);
  for (unsigned k = 0; k < idx.m + idx.n; ++k) scale *= idx.rho;
  return phi * QComplex(scale);
}

inline BiPoly<Rational> complex_hermite(unsigned m, unsigned n) { return complex_hermite(HermiteIndex(m, n)); }

/// Evaluates p at z in double precision; x_y form reads z = x + i y.
template <class T>
std::complex<double> evaluate(const BiPoly<T>& p, std::complex<double> z) {
  std::complex<double> u = z, v = std::conj(z);
  if (p.form() == BiForm::x_y) {
    u = z.real();
    v = z.imag();
  }
  std::complex<double> acc = 0;
  for (const auto& [e, c] : p.poly().terms()) {
    std::complex<double> term = to_std(c);
    for (unsigned k = 0; k < e[0]; ++k) term *= u;
    for (unsigned k = 0; k < e[1]; ++k) term *= v;
    acc += term;
  }
  return acc;
}

/// A_theta p = 2 rho cos(theta) d_z d_zbar p - e^{i theta} z d_z p - e^{-i theta} zbar d_zbar p,
/// with cos(theta), sin(theta) supplied exactly.
template <class T>
BiPoly<T> ou_apply(const BiPoly<T>& p, const T& cos_theta, const T& sin_theta, const T& rho) {
  if (p.form() != BiForm::z_zbar) throw ShapeError("ou_apply expects a polynomial in (z, zbar) form");
  if constexpr (scalar_traits<T>::exact) {
    if (cos_theta * cos_theta + sin_theta * sin_theta != T(1L))
      throw std::domain_error("cos^2 + sin^2 != 1 for the supplied angle");
    if (!(to_double(cos_theta) > 0)) throw std::domain_error("theta must lie in (-pi/2, pi/2)");
    if (!(to_double(rho) > 0)) throw std::domain_error("rho must be positive");
  }
  const Complex<T> rot{cos_theta, sin_theta};
  const Complex<T> rot_bar{cos_theta, T(-sin_theta)};
  const T diffusion = T(2L) * rho * cos_theta;
  BiPoly<T> out(BiForm::z_zbar);
  for (const auto& [e, c] : p.poly().terms()) {
    const unsigned a = e[0], b = e[1];
    if (a > 0 && b > 0)
      out = out + BiPoly<T>::monomial(BiForm::z_zbar, a - 1, b - 1, c * Complex<T>(diffusion * T(static_cast<long>(a * b))));
    Complex<T> drift = rot * Complex<T>(T(static_cast<long>(a))) + rot_bar * Complex<T>(T(static_cast<long>(b)));
    out = out - BiPoly<T>::monomial(BiForm::z_zbar, a, b, c * drift);
  }
  return out;
}

/// Floating-point A_theta for angles without exact trigonometric values.
inline BiPoly<double> ou_apply(const BiPoly<double>& p, double theta, double rho) {
  if (!(std::abs(theta) < std::numbers::pi / 2)) throw std::domain_error("theta must lie in (-pi/2, pi/2)");
  if (!(rho > 0)) throw std::domain_error("rho must be positive");
  return ou_apply<double>(p, std::cos(theta), std::sin(theta), rho);
}

/// z^r zbar^s = sum_i C(r,i) C(s,i) i! 2^i J_{r-i,s-i}(z)  (rho = 2).
inline std::map<std::pair<unsigned, unsigned>, Rational> expand_monomial(unsigned r, unsigned s) {
  std::map<std::pair<unsigned, unsigned>, Rational> out;
  Rational two_pow(1);
  for (unsigned i = 0; i <= std::min(r, s); ++i) {
    out[{r - i, s - i}] = binomial(r, i) * binomial(s, i) * factorial(i) * two_pow;
    two_pow *= 2;
  }
  return out;
}

}  // namespace cchaos
