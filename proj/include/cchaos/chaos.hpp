#pragma once

// Finite-dimensional realisations of the real and complex isonormal processes
// and pathwise evaluation of multiple Wiener-Ito integrals.
//
// Coordinates: a sample carries xi_1..xi_D (the process X) and eta_1..eta_D
// (its independent copy Y). Real kernels live on R^{2D} with slots 0..D-1
// reading xi and slots D..2D-1 reading eta. Complex kernels live on C^D with
// zeta_k = xi_k + i eta_k, so E|zeta_k|^2 = 2 and Z(h) = sum_k h_k zeta_k / sqrt 2.

#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cchaos/convert.hpp"
#include "cchaos/errors.hpp"
#include "cchaos/hermite.hpp"
#include "cchaos/number.hpp"
#include "cchaos/polynomial.hpp"
#include "cchaos/rng.hpp"
#include "cchaos/tensor.hpp"
#include "cchaos/wick.hpp"

namespace cchaos {

// ---- samples ---------------------------------------------------------------

struct GaussianSample {
  std::vector<double> xi;
  std::vector<double> eta;

  std::size_t dim() const { return xi.size(); }
  std::complex<double> zeta(std::size_t k) const { return {xi[k], eta[k]}; }
  /// Coordinate j of R^{2D}: xi for j < D, eta otherwise.
  double coord(std::size_t j) const { return j < xi.size() ? xi[j] : eta[j - xi.size()]; }
};

/// Sample `index` of the stream keyed by seed. xi and eta use separate
/// counter streams, so a coordinate's value does not depend on D.
inline GaussianSample sample_at(std::size_t D, std::uint64_t seed, std::uint64_t index) {
  GaussianSample s{std::vector<double>(D), std::vector<double>(D)};
  NormalStream ns(seed);
  ns.fill(index, 0, s.xi.data(), D);
  ns.fill(index, 1, s.eta.data(), D);
  return s;
}

inline std::vector<GaussianSample> sample_batch(std::size_t D, std::size_t N, std::uint64_t seed) {
  if (D < 1 || N < 1) throw std::invalid_argument("sample_batch needs D >= 1 and N >= 1");
  std::vector<GaussianSample> out;
  out.reserve(N);
  for (std::size_t i = 0; i < N; ++i) out.push_back(sample_at(D, seed, i));
  return out;
}

// ---- complex kernels -------------------------------------------------------

/// Sorted m-tuple and sorted n-tuple: an element e_a (x) conj(e_b) of the basis.
using BiTuple = std::pair<Tuple, Tuple>;

/// Element of (C^D)^{(.)m} (x) (C^D)^{(.)n}, symmetric within each block of
/// slots, stored on pairs of sorted tuples (dense value at any reordering
/// within a block).
template <class T>
class ComplexKernel {
 public:
  using Scalar = T;
  using Coeff = Complex<T>;

  ComplexKernel() = default;
  ComplexKernel(unsigned m, unsigned n, std::size_t dim) : m_(m), n_(n), dim_(dim) {
    if (dim < 1) throw ShapeError("kernel dimension must be positive");
  }

  unsigned m() const { return m_; }
  unsigned n() const { return n_; }
  std::size_t dim() const { return dim_; }
  const std::map<BiTuple, Coeff>& entries() const { return entries_; }

  Coeff get(Tuple a, Tuple b) const {
    normalise(a, b);
    auto it = entries_.find({a, b});
    return it == entries_.end() ? from_rational<Coeff>(Rational(0)) : it->second;
  }

  void set(Tuple a, Tuple b, const Coeff& v) {
    normalise(a, b);
    if (cchaos::is_zero(v))
      entries_.erase({a, b});
    else
      entries_[{a, b}] = v;
  }

  void add(Tuple a, Tuple b, const Coeff& v) {
    normalise(a, b);
    if (cchaos::is_zero(v)) return;
    auto [it, fresh] = entries_.try_emplace({a, b}, v);
    if (!fresh) {
      it->second += v;
      if (cchaos::is_zero(it->second)) entries_.erase(it);
    }
  }

  ComplexKernel& operator+=(const ComplexKernel& o) {
    same_shape(o);
    for (const auto& [ab, v] : o.entries_) add(ab.first, ab.second, v);
    return *this;
  }
  ComplexKernel& operator*=(const Coeff& s) {
    if (cchaos::is_zero(s)) entries_.clear();
    for (auto& [ab, v] : entries_) v *= s;
    return *this;
  }
  friend ComplexKernel operator+(ComplexKernel a, const ComplexKernel& b) { return a += b; }
  friend ComplexKernel operator*(ComplexKernel a, const Coeff& s) { return a *= s; }
  friend bool operator==(const ComplexKernel& a, const ComplexKernel& b) {
    return a.m_ == b.m_ && a.n_ == b.n_ && a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

  void same_shape(const ComplexKernel& o) const {
    if (o.m_ != m_ || o.n_ != n_ || o.dim_ != dim_) throw ShapeError("kernels of different bidegree or dimension");
  }

  template <class U, class F>
  ComplexKernel<U> map(F f) const {
    ComplexKernel<U> out(m_, n_, dim_);
    for (const auto& [ab, v] : entries_) out.set(ab.first, ab.second, f(v));
    return out;
  }

 private:
  void normalise(Tuple& a, Tuple& b) const {
    if (a.size() != m_ || b.size() != n_) throw ShapeError("tuple lengths do not match kernel bidegree");
    for (auto i : a)
      if (i >= dim_) throw ShapeError("kernel index out of range");
    for (auto i : b)
      if (i >= dim_) throw ShapeError("kernel index out of range");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }

  unsigned m_ = 0, n_ = 0;
  std::size_t dim_ = 1;
  std::map<BiTuple, Coeff> entries_;
};

/// <phi, psi> = sum over full tuples of phi * conj(psi).
template <class T>
Complex<T> inner(const ComplexKernel<T>& phi, const ComplexKernel<T>& psi) {
  phi.same_shape(psi);
  Complex<T> acc = from_rational<Complex<T>>(Rational(0));
  for (const auto& [ab, v] : phi.entries()) {
    auto it = psi.entries().find(ab);
    if (it == psi.entries().end()) continue;
    acc += v * conj(it->second) * from_rational<T>(tuple_multinomial(ab.first) * tuple_multinomial(ab.second));
  }
  return acc;
}

template <class T>
T norm2(const ComplexKernel<T>& phi) {
  return inner(phi, phi).re;
}

/// Kernel psi of bidegree (n, m) with conj(I_{m,n}(phi)) = I_{n,m}(psi).
template <class T>
ComplexKernel<T> conjugate_kernel(const ComplexKernel<T>& phi) {
  ComplexKernel<T> out(phi.n(), phi.m(), phi.dim());
  for (const auto& [ab, v] : phi.entries()) out.set(ab.second, ab.first, conj(v));
  return out;
}

/// h^{(x)m} (x) conj(h)^{(x)n}.
template <class T>
ComplexKernel<T> rank_one_kernel(const std::vector<Complex<T>>& h, unsigned m, unsigned n) {
  ComplexKernel<T> out(m, n, h.size());
  std::vector<Complex<T>> hb;
  for (const auto& x : h) hb.push_back(conj(x));
  // walk sorted m-tuples and sorted n-tuples independently
  auto tuples = [&](unsigned len, const std::vector<Complex<T>>& w) {
    std::vector<std::pair<Tuple, Complex<T>>> acc;
    Tuple t(len);
    std::function<void(unsigned, std::uint16_t, Complex<T>)> rec = [&](unsigned pos, std::uint16_t from, Complex<T> val) {
      if (pos == len) {
        acc.emplace_back(t, val);
        return;
      }
      for (std::uint16_t i = from; i < w.size(); ++i) {
        if (cchaos::is_zero(w[i])) continue;
        t[pos] = i;
        rec(pos + 1, i, val * w[i]);
      }
    };
    rec(0, 0, from_rational<Complex<T>>(Rational(1)));
    return acc;
  };
  for (const auto& [a, va] : tuples(m, h))
    for (const auto& [b, vb] : tuples(n, hb)) out.set(a, b, va * vb);
  return out;
}

// ---- pathwise evaluation ---------------------------------------------------

/// J_{a,b}(z) for a, b <= max_deg with rho = 2, via J_{a+1,b} = z J_{a,b} - 2 b J_{a,b-1}.
class ComplexHermiteTable {
 public:
  explicit ComplexHermiteTable(unsigned max_deg) : n_(max_deg + 1), v_(n_ * n_) {}

  void fill(std::complex<double> z) {
    const std::complex<double> zb = std::conj(z);
    at(0, 0) = 1;
    for (unsigned b = 1; b < n_; ++b) at(0, b) = at(0, b - 1) * zb;
    for (unsigned a = 0; a + 1 < n_; ++a)
      for (unsigned b = 0; b < n_; ++b) {
        at(a + 1, b) = z * at(a, b);
        if (b) at(a + 1, b) -= 2.0 * b * at(a, b - 1);
      }
  }
  std::complex<double> operator()(unsigned a, unsigned b) const { return v_[a * n_ + b]; }
  unsigned max_degree() const { return n_ - 1; }

 private:
  std::complex<double>& at(unsigned a, unsigned b) { return v_[a * n_ + b]; }
  unsigned n_;
  std::vector<std::complex<double>> v_;
};

inline std::vector<double> hermite_values(unsigned max_deg, double x) {
  std::vector<double> h(max_deg + 1);
  h[0] = 1;
  if (max_deg >= 1) h[1] = x;
  for (unsigned k = 1; k < max_deg; ++k) h[k + 1] = x * h[k] - k * h[k - 1];
  return h;
}

namespace detail {

// (p!/p-vec!) and per-coordinate exponents of a sorted tuple.
inline std::vector<std::pair<std::uint16_t, unsigned>> runs(const Tuple& sorted) {
  std::vector<std::pair<std::uint16_t, unsigned>> out;
  for (auto i : sorted) {
    if (!out.empty() && out.back().first == i)
      ++out.back().second;
    else
      out.emplace_back(i, 1u);
  }
  return out;
}

}  // namespace detail

/// Precompiled complex kernel: one product of per-coordinate J factors per term.
class ComplexEvaluator {
 public:
  struct Factor {
    std::uint16_t coord;
    std::uint8_t a, b;
  };
  struct Term {
    std::complex<double> coeff;  // includes (m!/a!)(n!/b!) and 2^{-(m+n)/2}
    std::vector<Factor> factors;
  };

  template <class T>
  explicit ComplexEvaluator(const ComplexKernel<T>& phi) : dim_(phi.dim()), max_deg_(std::max(phi.m(), phi.n())) {
    const double scale = std::pow(2.0, -0.5 * (phi.m() + phi.n()));
    std::vector<bool> used(dim_, false);
    for (const auto& [ab, v] : phi.entries()) {
      std::map<std::uint16_t, std::pair<unsigned, unsigned>> deg;
      for (auto [i, c] : detail::runs(ab.first)) deg[i].first = c;
      for (auto [i, c] : detail::runs(ab.second)) deg[i].second = c;
      Term t;
      const Rational w = tuple_multinomial(ab.first) * tuple_multinomial(ab.second);
      t.coeff = to_std(v) * (w.get_d() * scale);
      for (auto [i, d] : deg) {
        t.factors.push_back({i, static_cast<std::uint8_t>(d.first), static_cast<std::uint8_t>(d.second)});
        used[i] = true;
      }
      terms_.push_back(std::move(t));
    }
    for (std::size_t i = 0; i < dim_; ++i)
      if (used[i]) coords_.push_back(static_cast<std::uint16_t>(i));
  }

  std::size_t dim() const { return dim_; }

  std::complex<double> operator()(const GaussianSample& s) const {
    if (s.dim() != dim_) throw ShapeError("sample dimension does not match kernel");
    thread_local std::vector<ComplexHermiteTable> tables;
    thread_local std::vector<std::size_t> slot;
    if (tables.size() != coords_.size() || (!tables.empty() && tables[0].max_degree() != max_deg_))
      tables.assign(coords_.size(), ComplexHermiteTable(max_deg_));
    slot.assign(dim_, 0);
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      slot[coords_[j]] = j;
      tables[j].fill(s.zeta(coords_[j]));
    }
    std::complex<double> acc = 0;
    for (const auto& t : terms_) {
      std::complex<double> p = t.coeff;
      for (const auto& f : t.factors) p *= tables[slot[f.coord]](f.a, f.b);
      acc += p;
    }
    return acc;
  }

 private:
  std::size_t dim_;
  unsigned max_deg_;
  std::vector<std::uint16_t> coords_;
  std::vector<Term> terms_;
};

/// Precompiled real kernel over R^{2D}.
class RealEvaluator {
 public:
  template <class T>
  explicit RealEvaluator(const SymTensor<T>& f) : dim2_(f.dim()), order_(f.order()) {
    if (dim2_ % 2) throw ShapeError("real kernels live on R^{2D}");
    const Rational pf = factorial(order_);
    for (const auto& [t, v] : f.entries()) {
      Term term;
      term.coeff = to_double(v) * Rational(pf / multi_factorial(counts_of(t))).get_d();
      for (auto [i, c] : detail::runs(t)) term.factors.emplace_back(i, c);
      terms_.push_back(std::move(term));
    }
  }

  double operator()(const GaussianSample& s) const {
    if (2 * s.dim() != dim2_) throw ShapeError("sample dimension does not match kernel");
    thread_local std::vector<std::vector<double>> h;
    h.resize(dim2_);
    for (std::size_t j = 0; j < dim2_; ++j) h[j] = hermite_values(order_, s.coord(j));
    double acc = 0;
    for (const auto& t : terms_) {
      double p = t.coeff;
      for (auto [i, c] : t.factors) p *= h[i][c];
      acc += p;
    }
    return acc;
  }

 private:
  static std::vector<unsigned> counts_of(const Tuple& t) {
    std::vector<unsigned> c;
    for (auto [i, k] : detail::runs(t)) c.push_back(k);
    return c;
  }
  struct Term {
    double coeff;
    std::vector<std::pair<std::uint16_t, unsigned>> factors;
  };
  std::size_t dim2_;
  unsigned order_;
  std::vector<Term> terms_;
};

/// I_p(f) = sum_{|m|=p} (p!/m!) f[m] prod_k H_{m_k}(coord_k).
template <class T>
double eval_real(const SymTensor<T>& f, const GaussianSample& s) {
  return RealEvaluator(f)(s);
}

/// I_{m,n}(phi) = sum (m!/a!)(n!/b!) phi[a,b] prod_k 2^{-(a_k+b_k)/2} J_{a_k,b_k}(zeta_k).
template <class T>
std::complex<double> eval_complex(const ComplexKernel<T>& phi, const GaussianSample& s) {
  return ComplexEvaluator(phi)(s);
}

// ---- exact field for decompositions ----------------------------------------

/// Scalar able to hold 2^{-(m+n)/2} times kernel coefficients.
template <class T>
struct decomposition_scalar {
  using type = QSqrt2;
};
template <>
struct decomposition_scalar<double> {
  using type = double;
};
template <class T>
using decomposition_scalar_t = typename decomposition_scalar<T>::type;

namespace detail {

template <class S, class T>
S lift_scalar(const T& x) {
  if constexpr (std::is_same_v<S, T>)
    return x;
  else if constexpr (std::is_same_v<S, double>)
    return to_double(x);
  else
    return S(x);
}

template <class S>
S sqrt2_power(int e) {
  return scalar_traits<S>::sqrt2_pow(e);
}

}  // namespace detail

/// Real pair (u, v) over R^{2D} of order m + n with I_{m,n}(phi) = I_{m+n}(u) + i I_{m+n}(v).
template <class T>
std::pair<SymTensor<decomposition_scalar_t<T>>, SymTensor<decomposition_scalar_t<T>>> decompose(const ComplexKernel<T>& phi) {
  using S = decomposition_scalar_t<T>;
  using CS = Complex<S>;
  const std::size_t D = phi.dim();
  const unsigned p = phi.m() + phi.n();
  const S scale = detail::sqrt2_power<S>(-static_cast<int>(p));
  std::map<unsigned, H2JTables> tables;
  auto table = [&](unsigned l) -> const ConversionTable& {
    auto it = tables.find(l);
    if (it == tables.end()) it = tables.emplace(l, h2j_table(l)).first;
    return it->second.complex_to_real;
  };
  // beta on real multi-indices, keyed by sorted 2D-tuple
  std::map<Tuple, CS> beta;
  for (const auto& [ab, v] : phi.entries()) {
    std::map<std::uint16_t, std::pair<unsigned, unsigned>> deg;
    for (auto [i, c] : detail::runs(ab.first)) deg[i].first = c;
    for (auto [i, c] : detail::runs(ab.second)) deg[i].second = c;
    CS alpha{detail::lift_scalar<S>(v.re), detail::lift_scalar<S>(v.im)};
    alpha *= from_rational<S>(tuple_multinomial(ab.first) * tuple_multinomial(ab.second));
    alpha *= scale;
    // expand prod_k J_{a_k,b_k}(zeta_k) into prod_k sum_j c_j H_j(xi_k) H_{l-j}(eta_k)
    std::vector<std::pair<Tuple, CS>> partial{{Tuple{}, alpha}};
    for (auto [k, d] : deg) {
      const unsigned l = d.first + d.second;
      const auto& row = table(l).coef[d.first];
      std::vector<std::pair<Tuple, CS>> next;
      for (const auto& [t, c] : partial)
        for (unsigned j = 0; j <= l; ++j) {
          if (cchaos::is_zero(row[j])) continue;
          Tuple u = t;
          u.insert(u.end(), j, static_cast<std::uint16_t>(k));
          u.insert(u.end(), l - j, static_cast<std::uint16_t>(D + k));
          CS cj{from_rational<S>(row[j].re), from_rational<S>(row[j].im)};
          next.emplace_back(std::move(u), c * cj);
        }
      partial = std::move(next);
    }
    for (auto& [t, c] : partial) {
      std::sort(t.begin(), t.end());
      auto [it, fresh] = beta.try_emplace(t, c);
      if (!fresh) it->second += c;
    }
  }
  SymTensor<S> u(p, 2 * D), w(p, 2 * D);
  const Rational pf = factorial(p);
  for (const auto& [t, c] : beta) {
    // I_p(f) weights multi-index m by p!/m!, so f[m] = beta * m!/p!
    std::vector<unsigned> counts;
    for (auto [i, k] : detail::runs(t)) counts.push_back(k);
    const S weight = from_rational<S>(Rational(multi_factorial(counts) / pf));
    u.set(t, c.re * weight);
    w.set(t, c.im * weight);
  }
  return {u, w};
}

// ---- polynomial forms for the pairing oracle -------------------------------

namespace detail {

template <class C>
Polynomial<C> hermite_in(std::size_t nvars, std::size_t var, unsigned deg) {
  std::vector<C> coeffs;
  for (const auto& c : real_hermite_coeffs(deg)) coeffs.push_back(from_rational<C>(c));
  return compose(coeffs, Polynomial<C>::variable(nvars, var));
}

}  // namespace detail

/// I_p(f) as a polynomial in the 2D coordinates (xi_1..xi_D, eta_1..eta_D).
template <class T>
Polynomial<Complex<T>> to_gauss_poly(const SymTensor<T>& f) {
  using C = Complex<T>;
  const std::size_t n = f.dim();
  const Rational pf = factorial(f.order());
  std::map<std::pair<std::size_t, unsigned>, Polynomial<C>> cache;
  Polynomial<C> out(n);
  for (const auto& [t, v] : f.entries()) {
    std::vector<unsigned> counts;
    Polynomial<C> term = Polynomial<C>::constant(n, C(v) * C(from_rational<T>(Rational(pf))));
    for (auto [i, c] : detail::runs(t)) {
      counts.push_back(c);
      auto key = std::make_pair(std::size_t{i}, c);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, detail::hermite_in<C>(n, i, c)).first;
      term = term * it->second;
    }
    term *= C(from_rational<T>(Rational(1 / multi_factorial(counts))));
    out += term;
  }
  return out;
}

/// I_{m,n}(phi) as a polynomial in the 2D real coordinates, exact in Q(sqrt2)
/// (or double for floating kernels).
template <class T>
Polynomial<Complex<decomposition_scalar_t<T>>> to_gauss_poly(const ComplexKernel<T>& phi) {
  using S = decomposition_scalar_t<T>;
  using C = Complex<S>;
  const std::size_t D = phi.dim();
  const S scale = detail::sqrt2_power<S>(-static_cast<int>(phi.m() + phi.n()));
  std::map<std::tuple<std::size_t, unsigned, unsigned>, Polynomial<C>> cache;
  Polynomial<C> out(2 * D);
  for (const auto& [ab, v] : phi.entries()) {
    std::map<std::uint16_t, std::pair<unsigned, unsigned>> deg;
    for (auto [i, c] : detail::runs(ab.first)) deg[i].first = c;
    for (auto [i, c] : detail::runs(ab.second)) deg[i].second = c;
    C coeff{detail::lift_scalar<S>(v.re), detail::lift_scalar<S>(v.im)};
    coeff *= from_rational<S>(tuple_multinomial(ab.first) * tuple_multinomial(ab.second));
    coeff *= scale;
    Polynomial<C> term = Polynomial<C>::constant(2 * D, coeff);
    for (auto [k, d] : deg) {
      auto key = std::make_tuple(std::size_t{k}, d.first, d.second);
      auto it = cache.find(key);
      if (it == cache.end()) {
        auto j = complex_hermite(d.first, d.second).to_xy().poly();
        auto lifted = j.map_coefficients([](const QComplex& c) { return C{from_rational<S>(c.re), from_rational<S>(c.im)}; });
        it = cache.emplace(key, lifted.embed(2 * D, {k, D + k})).first;
      }
      term = term * it->second;
    }
    out += term;
  }
  return out;
}

/// Exact expectation of a polynomial in the 2D standard coordinates.
template <class C>
C exact_moment(const Polynomial<C>& p, unsigned budget = kWickDegreeBudget) {
  if (p.degree() > budget)
    throw BudgetExceeded("Gaussian degree " + std::to_string(p.degree()) + " exceeds budget " + std::to_string(budget));
  return expect(GaussianFamily<Rational>::standard(p.nvars()), p, budget);
}

/// Either a real kernel over R^{2D} or a complex kernel over C^D.
template <class T>
using ChaosElement = std::variant<SymTensor<T>, ComplexKernel<T>>;

// ---- kernel files ------------------------------------------------------------
//   m n D
//   a1 .. am b1 .. bn re im      (1-based indices)

template <class T>
void write_kernel(std::ostream& os, const ComplexKernel<T>& phi) {
  os << phi.m() << ' ' << phi.n() << ' ' << phi.dim() << '\n';
  for (const auto& [ab, v] : phi.entries()) {
    for (auto i : ab.first) os << (i + 1) << ' ';
    for (auto i : ab.second) os << (i + 1) << ' ';
    os << to_str(v.re) << ' ' << to_str(v.im) << '\n';
  }
}

template <class T>
ComplexKernel<T> read_kernel(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::next_line(is, line, lineno)) throw ParseError("kernel file: missing header");
  std::istringstream hs(line);
  long m = -1, n = -1, d = -1;
  std::string extra;
  if (!(hs >> m >> n >> d) || (hs >> extra) || m < 0 || n < 0 || d < 1 || d > 65535 || m + n > 64)
    throw ParseError("kernel file: bad header '" + line + "'");
  ComplexKernel<T> phi(static_cast<unsigned>(m), static_cast<unsigned>(n), static_cast<std::size_t>(d));
  const auto where = [&] { return "kernel file line " + std::to_string(lineno) + ": "; };
  while (detail::next_line(is, line, lineno)) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.size() != static_cast<std::size_t>(m + n + 2)) throw ParseError(where() + "expected " + std::to_string(m + n + 2) + " fields");
    Tuple a, b;
    for (long j = 0; j < m + n; ++j) {
      long i = 0;
      try {
        std::size_t used = 0;
        i = std::stol(tok[j], &used);
        if (used != tok[j].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError(where() + "bad index '" + tok[j] + "'");
      }
      if (i < 1 || i > d) throw ParseError(where() + "index out of range");
      (j < m ? a : b).push_back(static_cast<std::uint16_t>(i - 1));
    }
    Complex<T> v;
    try {
      v = {detail::parse_scalar<T>(tok[m + n]), detail::parse_scalar<T>(tok[m + n + 1])};
    } catch (const std::invalid_argument& e) {
      throw ParseError(where() + e.what());
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (phi.entries().count({a, b})) throw ParseError(where() + "repeated index pair");
    phi.set(a, b, v);
  }
  return phi;
}

}  // namespace cchaos
