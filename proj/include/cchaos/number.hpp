#pragma once

// Scalar types shared by every module: GMP rationals, the quadratic field
// Q(sqrt 2), and a minimal complex type that works over any of them.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <gmpxx.h>

namespace cchaos {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p", "p/q", or a finite decimal "d.ddd[e±x]" exactly.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (text.find_first_of(".eE") == std::string::npos) {
    Rational r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("bad rational literal '" + text + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
  }
  std::string mant = text;
  long exp10 = 0;
  if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
    try {
      std::size_t used = 0;
      exp10 = std::stol(mant.substr(e + 1), &used);
      if (used != mant.size() - e - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent in '" + text + "'");
    }
    mant = mant.substr(0, e);
  }
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant == "-" || mant == "+") throw std::invalid_argument("bad decimal '" + text + "'");
  mpz_class digits;
  if (digits.set_str(mant[0] == '+' ? mant.substr(1) : mant, 10) != 0)
    throw std::invalid_argument("bad decimal '" + text + "'");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 < 0 ? Rational(digits, scale) : Rational(digits * scale);
  r.canonicalize();
  return r;
}

/// Element a + b*sqrt(2) of the quadratic field Q(sqrt 2).
///
/// Complex multiple integrals carry the normalisation 2^{-(m+n)/2}; keeping
/// it symbolic lets the real/complex decomposition stay exact.
class QSqrt2 {
 public:
  QSqrt2() = default;
  QSqrt2(int v) : a_(v) {}                 // NOLINT(google-explicit-constructor)
  QSqrt2(long v) : a_(v) {}                // NOLINT(google-explicit-constructor)
  QSqrt2(const Rational& a) : a_(a) {}     // NOLINT(google-explicit-constructor)
  QSqrt2(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {}

  static QSqrt2 sqrt2() { return {Rational(0), Rational(1)}; }

  /// (sqrt 2)^e for any integer e.
  static QSqrt2 sqrt2_pow(int e) {
    const unsigned k = static_cast<unsigned>(e < 0 ? -e : e);
    Rational p(1);
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, k / 2);
    p = Rational(two_pow);
    if (e < 0) p = 1 / p;
    if (k % 2 == 0) return {p, Rational(0)};
    // odd power: sqrt2^(2j+1) = 2^j sqrt2;  sqrt2^-(2j+1) = sqrt2 / 2^(j+1)
    if (e > 0) return {Rational(0), p};
    return {Rational(0), Rational(p / 2)};
  }

  const Rational& rational_part() const { return a_; }
  const Rational& sqrt2_part() const { return b_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }

  double to_double() const { return a_.get_d() + b_.get_d() * std::sqrt(2.0); }

  QSqrt2 operator-() const { return {Rational(-a_), Rational(-b_)}; }
  QSqrt2& operator+=(const QSqrt2& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  QSqrt2& operator-=(const QSqrt2& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  QSqrt2& operator*=(const QSqrt2& o) {
    if (o.is_rational()) {
      a_ *= o.a_;
      b_ *= o.a_;
    } else if (is_rational()) {
      b_ = a_ * o.b_;
      a_ *= o.a_;
    } else {
      Rational na = a_ * o.a_ + 2 * b_ * o.b_;
      Rational nb = a_ * o.b_ + b_ * o.a_;
      a_ = std::move(na);
      b_ = std::move(nb);
    }
    return *this;
  }
  QSqrt2& operator/=(const QSqrt2& o) {
    Rational norm = o.a_ * o.a_ - 2 * o.b_ * o.b_;
    if (sgn(norm) == 0) throw std::domain_error("division by zero in Q(sqrt2)");
    *this *= QSqrt2(Rational(o.a_ / norm), Rational(-o.b_ / norm));
    return *this;
  }

  friend QSqrt2 operator+(QSqrt2 x, const QSqrt2& y) { return x += y; }
  friend QSqrt2 operator-(QSqrt2 x, const QSqrt2& y) { return x -= y; }
  friend QSqrt2 operator*(QSqrt2 x, const QSqrt2& y) { return x *= y; }
  friend QSqrt2 operator/(QSqrt2 x, const QSqrt2& y) { return x /= y; }
  friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
  friend bool operator!=(const QSqrt2& x, const QSqrt2& y) { return !(x == y); }

  std::string str() const {
    if (is_rational()) return a_.get_str();
    std::string s;
    if (sgn(a_) != 0) s = a_.get_str() + (sgn(b_) > 0 ? "+" : "");
    return s + b_.get_str() + "*sqrt2";
  }

 private:
  Rational a_{0};
  Rational b_{0};
};

inline std::ostream& operator<<(std::ostream& os, const QSqrt2& x) { return os << x.str(); }

// Parses the forms written by QSqrt2::str(): "r", "s*sqrt2", "r+s*sqrt2", "r-s*sqrt2".
inline QSqrt2 parse_qsqrt2(const std::string& text) {
  const std::string tag = "*sqrt2";
  auto pos = text.find(tag);
  if (pos == std::string::npos) return QSqrt2(parse_rational(text));
  if (pos + tag.size() != text.size()) throw std::invalid_argument("bad Q(sqrt2) literal '" + text + "'");
  std::string head = text.substr(0, pos);
  // split at the last sign that is not the first character and not after an exponent marker
  std::size_t split = std::string::npos;
  for (std::size_t i = head.size(); i-- > 1;) {
    if ((head[i] == '+' || head[i] == '-') && head[i - 1] != 'e' && head[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {Rational(0), parse_rational(head)};
  std::string b = head.substr(split);
  if (b[0] == '+') b.erase(0, 1);
  return {parse_rational(head.substr(0, split)), parse_rational(b)};
}

/// Complex number over an arbitrary real scalar (Rational, QSqrt2, double).
template <class T>
struct Complex {
  T re{};
  T im{};

  Complex() = default;
  Complex(T r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, int>>>
  Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

  static Complex i() { return {T(0), T(1)}; }

  Complex operator-() const { return {T(-re), T(-im)}; }
  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    T i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  Complex& operator*=(const T& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    T r = (re * o.re + im * o.im) / den;
    T i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend Complex operator+(Complex x, const Complex& y) { return x += y; }
  friend Complex operator-(Complex x, const Complex& y) { return x -= y; }
  friend Complex operator*(Complex x, const Complex& y) { return x *= y; }
  friend Complex operator*(Complex x, const T& s) { return x *= s; }
  friend Complex operator*(const T& s, Complex x) { return x *= s; }
  friend Complex operator/(Complex x, const Complex& y) { return x /= y; }
  friend bool operator==(const Complex& x, const Complex& y) { return x.re == y.re && x.im == y.im; }
  friend bool operator!=(const Complex& x, const Complex& y) { return !(x == y); }
};

using QComplex = Complex<Rational>;

// ---- scalar traits -------------------------------------------------------

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational from_rational(const Rational& r) { return r; }
  static double to_double(const Rational& r) { return r.get_d(); }
  static bool is_zero(const Rational& r) { return sgn(r) == 0; }
  static std::string str(const Rational& r) { return r.get_str(); }
};

template <>
struct scalar_traits<QSqrt2> {
  static constexpr bool exact = true;
  static QSqrt2 from_rational(const Rational& r) { return QSqrt2(r); }
  static double to_double(const QSqrt2& x) { return x.to_double(); }
  static bool is_zero(const QSqrt2& x) { return x.is_zero(); }
  static std::string str(const QSqrt2& x) { return x.str(); }
  static QSqrt2 sqrt2_pow(int e) { return QSqrt2::sqrt2_pow(e); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double from_rational(const Rational& r) { return r.get_d(); }
  static double to_double(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static std::string str(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  static double sqrt2_pow(int e) { return std::pow(std::sqrt(2.0), e); }
};

template <class T>
struct scalar_traits<Complex<T>> {
  using base = scalar_traits<T>;
  static constexpr bool exact = base::exact;
  static Complex<T> from_rational(const Rational& r) { return {base::from_rational(r), base::from_rational(Rational(0))}; }
  static bool is_zero(const Complex<T>& z) { return base::is_zero(z.re) && base::is_zero(z.im); }
  static std::string str(const Complex<T>& z) {
    if (base::is_zero(z.im)) return base::str(z.re);
    std::string im = base::str(z.im);
    if (base::is_zero(z.re)) {
      if constexpr (std::is_same_v<T, QSqrt2>) {
        if (!z.im.is_rational()) return "(" + im + ")i";
      }
      return im + "i";
    }
    // sqrt2 parts need grouping so "1+(2+3*sqrt2)i" reads unambiguously
    if constexpr (std::is_same_v<T, QSqrt2>) {
      if (!z.im.is_rational()) return base::str(z.re) + "+(" + im + ")i";
    }
    if (im[0] != '-') im = "+" + im;
    return base::str(z.re) + im + "i";
  }
};

template <class T>
T from_rational(const Rational& r) {
  return scalar_traits<T>::from_rational(r);
}

template <class T>
bool is_zero(const T& x) {
  return scalar_traits<T>::is_zero(x);
}

template <class T>
std::string to_str(const T& x) {
  return scalar_traits<T>::str(x);
}

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(const QSqrt2& x) { return x.to_double(); }
inline double to_double(double x) { return x; }

template <class T>
std::complex<double> to_std(const Complex<T>& z) {
  return {to_double(z.re), to_double(z.im)};
}

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return {z.re, T(-z.im)};
}

template <class T>
Complex<double> to_floating(const Complex<T>& z) {
  return {to_double(z.re), to_double(z.im)};
}

/// i^k for integer k >= 0.
template <class T>
Complex<T> i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {T(1), T(0)};
    case 1: return {T(0), T(1)};
    case 2: return {T(-1), T(0)};
    default: return {T(0), T(-1)};
  }
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Complex<T>& z) {
  return os << to_str(z);
}

}  // namespace cchaos
