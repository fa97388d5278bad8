#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "cchaos/errors.hpp"
#include "cchaos/number.hpp"

namespace cchaos {

using Exponents = std::vector<std::uint8_t>;

inline unsigned total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0u);
}

/// Sparse multivariate polynomial with a fixed number of variables.
///
/// Terms with zero coefficient are never stored, so structural equality is
/// polynomial equality for exact coefficient types.
template <class C>
class Polynomial {
 public:
  using Coeff = C;
  using Terms = std::map<Exponents, C>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const C& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw ShapeError("variable index out of range");
    Exponents e(nvars, 0);
    e[index] = 1;
    Polynomial p(nvars);
    p.add_term(std::move(e), from_rational<C>(Rational(1)));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  C coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? from_rational<C>(Rational(0)) : it->second;
  }

  void add_term(Exponents e, const C& c) {
    if (e.size() != nvars_) throw ShapeError("monomial arity does not match polynomial");
    if (cchaos::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (cchaos::is_zero(it->second)) terms_.erase(it);
    }
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  Polynomial& operator*=(const C& s) {
    if (cchaos::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const C& s) { return a *= s; }
  friend Polynomial operator*(const C& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= from_rational<C>(Rational(-1)); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_arity(b);
    Polynomial out(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = static_cast<std::uint8_t>(ea[v] + eb[v]);
        C c = ca;
        c *= cb;
        auto it = out.terms_.find(e);
        if (it == out.terms_.end())
          out.terms_.emplace(e, std::move(c));
        else
          it->second += c;
      }
    }
    out.prune();
    return out;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(unsigned k) const {
    Polynomial r = constant(nvars_, from_rational<C>(Rational(1)));
    Polynomial base = *this;
    while (k) {
      if (k & 1u) r *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return r;
  }

  template <class F>
  auto map_coefficients(F f) const -> Polynomial<decltype(f(std::declval<const C&>()))> {
    Polynomial<decltype(f(std::declval<const C&>()))> out(nvars_);
    for (const auto& [e, c] : terms_) out.add_term(e, f(c));
    return out;
  }

  /// Same coefficients, variables re-indexed into a larger space.
  Polynomial embed(std::size_t nvars, const std::vector<std::size_t>& target) const {
    if (target.size() != nvars_) throw ShapeError("embedding map has wrong length");
    Polynomial out(nvars);
    for (const auto& [e, c] : terms_) {
      Exponents f(nvars, 0);
      for (std::size_t v = 0; v < nvars_; ++v) {
        if (target[v] >= nvars) throw ShapeError("embedding target out of range");
        f[target[v]] = static_cast<std::uint8_t>(f[target[v]] + e[v]);
      }
      out.add_term(std::move(f), c);
    }
    return out;
  }

 private:
  template <class>
  friend class Polynomial;

  void check_arity(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw ShapeError("polynomials over different variable counts");
  }
  void prune() {
    std::erase_if(terms_, [](const auto& kv) { return cchaos::is_zero(kv.second); });
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

/// Univariate p(t) (coefficients by ascending power) composed with a polynomial q.
template <class C>
Polynomial<C> compose(const std::vector<C>& p, const Polynomial<C>& q) {
  Polynomial<C> out(q.nvars());
  // Horner
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    out = out * q;
    out.add_term(Exponents(q.nvars(), 0), *it);
  }
  return out;
}

}  // namespace cchaos
