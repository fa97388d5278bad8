#pragma once

// Symmetric tensors stored on sorted index tuples, with the contractions and
// the fourth-moment product formula for pairs of multiple integrals.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cchaos/combinatorics.hpp"
#include "cchaos/errors.hpp"
#include "cchaos/number.hpp"

namespace cchaos {

/// Index tuple; entries are 0-based in memory and 1-based in text files.
using Tuple = std::vector<std::uint16_t>;

/// |s|! / prod(multiplicities)! for a sorted tuple: the number of distinct
/// orderings of its entries.
inline Rational tuple_multinomial(const Tuple& sorted) {
  Rational r = factorial(static_cast<unsigned>(sorted.size()));
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    r /= factorial(static_cast<unsigned>(j - i));
    i = j;
  }
  return r;
}

/// Multiplicity vector (length dim) of a tuple.
inline std::vector<unsigned> tuple_counts(const Tuple& t, std::size_t dim) {
  std::vector<unsigned> c(dim, 0);
  for (auto i : t) ++c.at(i);
  return c;
}

/// Sparse, not necessarily symmetric tensor of order p over R^D.
template <class T>
class RawTensor {
 public:
  RawTensor(unsigned order, std::size_t dim) : order_(order), dim_(dim) {}

  unsigned order() const { return order_; }
  std::size_t dim() const { return dim_; }
  const std::map<Tuple, T>& entries() const { return entries_; }

  void add(const Tuple& t, const T& v) {
    check(t);
    if (cchaos::is_zero(v)) return;
    auto [it, fresh] = entries_.try_emplace(t, v);
    if (!fresh) {
      it->second += v;
      if (cchaos::is_zero(it->second)) entries_.erase(it);
    }
  }

  T get(const Tuple& t) const {
    check(t);
    auto it = entries_.find(t);
    return it == entries_.end() ? from_rational<T>(Rational(0)) : it->second;
  }

 private:
  void check(const Tuple& t) const {
    if (t.size() != order_) throw ShapeError("tuple length does not match tensor order");
    for (auto i : t)
      if (i >= dim_) throw ShapeError("tensor index out of range");
  }

  unsigned order_;
  std::size_t dim_;
  std::map<Tuple, T> entries_;
};

/// Fully symmetric tensor of order p over R^D, one value per sorted tuple.
/// The dense entry at every permutation of a sorted tuple equals that value.
template <class T>
class SymTensor {
 public:
  using Scalar = T;

  SymTensor() = default;
  SymTensor(unsigned order, std::size_t dim) : order_(order), dim_(dim) {}

  unsigned order() const { return order_; }
  std::size_t dim() const { return dim_; }
  const std::map<Tuple, T>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  /// Dense entry at any (unsorted) tuple.
  T get(Tuple t) const {
    check(t);
    std::sort(t.begin(), t.end());
    auto it = entries_.find(t);
    return it == entries_.end() ? from_rational<T>(Rational(0)) : it->second;
  }

  void set(Tuple t, const T& v) {
    check(t);
    std::sort(t.begin(), t.end());
    if (cchaos::is_zero(v))
      entries_.erase(t);
    else
      entries_[t] = v;
  }

  void add(Tuple t, const T& v) {
    check(t);
    std::sort(t.begin(), t.end());
    if (cchaos::is_zero(v)) return;
    auto [it, fresh] = entries_.try_emplace(t, v);
    if (!fresh) {
      it->second += v;
      if (cchaos::is_zero(it->second)) entries_.erase(it);
    }
  }

  SymTensor& operator+=(const SymTensor& o) {
    same_shape(o);
    for (const auto& [t, v] : o.entries_) add(t, v);
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    same_shape(o);
    for (const auto& [t, v] : o.entries_) add(t, T(-v));
    return *this;
  }
  SymTensor& operator*=(const T& s) {
    if (cchaos::is_zero(s)) entries_.clear();
    for (auto& [t, v] : entries_) v *= s;
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(SymTensor a, const T& s) { return a *= s; }
  friend SymTensor operator*(const T& s, SymTensor a) { return a *= s; }
  friend bool operator==(const SymTensor& a, const SymTensor& b) {
    return a.order_ == b.order_ && a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

  /// Dense view: every ordering of every stored tuple.
  RawTensor<T> to_raw() const {
    RawTensor<T> r(order_, dim_);
    for (const auto& [s, v] : entries_) {
      Tuple t = s;
      do r.add(t, v);
      while (std::next_permutation(t.begin(), t.end()));
    }
    return r;
  }

  template <class U, class F>
  SymTensor<U> map(F f) const {
    SymTensor<U> out(order_, dim_);
    for (const auto& [t, v] : entries_) out.set(t, f(v));
    return out;
  }

  void same_shape(const SymTensor& o) const {
    if (o.order_ != order_ || o.dim_ != dim_) throw ShapeError("tensors of different order or dimension");
  }

 private:
  void check(const Tuple& t) const {
    if (t.size() != order_) throw ShapeError("tuple length does not match tensor order");
    for (auto i : t)
      if (i >= dim_) throw ShapeError("tensor index out of range");
  }

  unsigned order_ = 0;
  std::size_t dim_ = 0;
  std::map<Tuple, T> entries_;
};

/// Average over all slot permutations.
template <class T>
SymTensor<T> symmetrize(const RawTensor<T>& f) {
  SymTensor<T> out(f.order(), f.dim());
  std::map<Tuple, T> acc;
  for (const auto& [t, v] : f.entries()) {
    Tuple s = t;
    std::sort(s.begin(), s.end());
    auto [it, fresh] = acc.try_emplace(s, v);
    if (!fresh) it->second += v;
  }
  for (auto& [s, v] : acc) out.set(s, v * from_rational<T>(Rational(1 / tuple_multinomial(s))));
  return out;
}

/// Full-tuple inner product: sum over sorted tuples of multinomial * f * g.
template <class T>
T inner(const SymTensor<T>& f, const SymTensor<T>& g) {
  f.same_shape(g);
  T acc = from_rational<T>(Rational(0));
  const auto& small = f.entries().size() <= g.entries().size() ? f : g;
  const auto& big = &small == &f ? g : f;
  for (const auto& [s, v] : small.entries()) {
    auto it = big.entries().find(s);
    if (it == big.entries().end()) continue;
    acc += v * it->second * from_rational<T>(tuple_multinomial(s));
  }
  return acc;
}

template <class T>
T norm2(const SymTensor<T>& f) {
  return inner(f, f);
}

/// Full-tuple inner product of raw tensors.
template <class T>
T inner(const RawTensor<T>& f, const RawTensor<T>& g) {
  if (f.order() != g.order() || f.dim() != g.dim()) throw ShapeError("tensors of different order or dimension");
  T acc = from_rational<T>(Rational(0));
  for (const auto& [t, v] : f.entries()) {
    auto it = g.entries().find(t);
    if (it != g.entries().end()) acc += v * it->second;
  }
  return acc;
}

template <class T>
T norm2(const RawTensor<T>& f) {
  return inner(f, f);
}

/// u contracted with v on their last r slots: order 2q - 2r,
/// (u (x)_r v)(a, b) = sum_c u(a, c) v(b, c).
template <class T>
RawTensor<T> contract(const SymTensor<T>& u, const SymTensor<T>& v, unsigned r) {
  u.same_shape(v);
  const unsigned q = u.order();
  if (r > q) throw std::out_of_range("contraction order exceeds tensor order");
  // group full tuples by their contracted tail
  auto split = [&](const SymTensor<T>& w) {
    std::map<Tuple, std::vector<std::pair<Tuple, T>>> by_tail;
    const auto raw = w.to_raw();
    for (const auto& [t, val] : raw.entries())
      by_tail[Tuple(t.end() - r, t.end())].emplace_back(Tuple(t.begin(), t.end() - r), val);
    return by_tail;
  };
  const auto us = split(u), vs = split(v);
  RawTensor<T> out(2 * (q - r), u.dim());
  for (const auto& [c, ulist] : us) {
    auto it = vs.find(c);
    if (it == vs.end()) continue;
    for (const auto& [a, x] : ulist)
      for (const auto& [b, y] : it->second) {
        Tuple ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        out.add(ab, x * y);
      }
  }
  return out;
}

template <class T>
SymTensor<T> contract_symmetrized(const SymTensor<T>& u, const SymTensor<T>& v, unsigned r) {
  return symmetrize(contract(u, v, r));
}

/// E[U^2 V^2] for U = I_q(u), V = I_q(v):
/// 2 (E UV)^2 + E U^2 E V^2
///   + sum_{r=1}^{q-1} C(q,r)^2 [ (q!)^2 |u (x)_r v|^2 + (r!)^2 C(q,r)^2 (2q-2r)! |u (x)~_r v|^2 ],
/// where E UV = q! <u, v>.
template <class T>
T prod_moment(const SymTensor<T>& u, const SymTensor<T>& v) {
  u.same_shape(v);
  const unsigned q = u.order();
  if (q == 0) throw ShapeError("product moment needs order >= 1");
  auto R = [](const Rational& x) { return from_rational<T>(x); };
  const T qf = R(factorial(q));
  const T euv = qf * inner(u, v);
  const T eu2 = qf * norm2(u);
  const T ev2 = qf * norm2(v);
  T acc = R(Rational(2)) * euv * euv + eu2 * ev2;
  for (unsigned r = 1; r < q; ++r) {
    const RawTensor<T> c = contract(u, v, r);
    const SymTensor<T> cs = symmetrize(c);
    const Rational b = binomial(q, r);
    const Rational rf = factorial(r);
    acc += R(b * b) * (qf * qf * norm2(c) + R(rf * rf * b * b * factorial(2 * (q - r))) * norm2(cs));
  }
  return acc;
}

/// h (x) ... (x) h (p times).
template <class T>
SymTensor<T> tensor_power(const std::vector<T>& h, unsigned p) {
  SymTensor<T> out(p, h.size());
  Tuple t(p, 0);
  // enumerate sorted tuples
  std::function<void(unsigned, std::uint16_t, T)> rec = [&](unsigned pos, std::uint16_t from, T val) {
    if (pos == p) {
      out.set(t, val);
      return;
    }
    for (std::uint16_t i = from; i < h.size(); ++i) {
      if (cchaos::is_zero(h[i])) continue;
      t[pos] = i;
      rec(pos + 1, i, val * h[i]);
    }
  };
  rec(0, 0, from_rational<T>(Rational(1)));
  return out;
}

/// symm(e_{i1} (x) ... (x) e_{ip}): value 1/multinomial at the sorted tuple.
template <class T>
SymTensor<T> symmetric_basis(Tuple t, std::size_t dim) {
  SymTensor<T> out(static_cast<unsigned>(t.size()), dim);
  std::sort(t.begin(), t.end());
  out.set(t, from_rational<T>(Rational(1 / tuple_multinomial(t))));
  return out;
}

// ---- text format -----------------------------------------------------------
//   p D
//   i1 ... ip value        (1-based indices, one line per sorted tuple)

template <class T>
void write_tensor(std::ostream& os, const SymTensor<T>& f) {
  os << f.order() << ' ' << f.dim() << '\n';
  for (const auto& [t, v] : f.entries()) {
    for (auto i : t) os << (i + 1) << ' ';
    os << to_str(v) << '\n';
  }
}

namespace detail {

template <class T>
T parse_scalar(const std::string& tok) {
  if constexpr (std::is_same_v<T, Rational>)
    return parse_rational(tok);
  else if constexpr (std::is_same_v<T, QSqrt2>)
    return parse_qsqrt2(tok);
  else {
    std::size_t used = 0;
    double d = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "'");
    return d;
  }
}

// Next non-blank, non-comment line.
inline bool next_line(std::istream& is, std::string& line, std::size_t& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace detail

template <class T>
SymTensor<T> read_tensor(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  if (!detail::next_line(is, line, lineno)) throw ParseError("tensor file: missing header");
  std::istringstream hs(line);
  long p = -1, d = -1;
  std::string extra;
  if (!(hs >> p >> d) || (hs >> extra) || p < 0 || d < 1 || d > 65535) throw ParseError("tensor file: bad header '" + line + "'");
  SymTensor<T> f(static_cast<unsigned>(p), static_cast<std::size_t>(d));
  while (detail::next_line(is, line, lineno)) {
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string w; ls >> w;) tok.push_back(w);
    if (tok.size() != static_cast<std::size_t>(p) + 1) throw ParseError("tensor file line " + std::to_string(lineno) + ": expected " + std::to_string(p + 1) + " fields");
    Tuple t;
    for (long j = 0; j < p; ++j) {
      long i = 0;
      try {
        std::size_t used = 0;
        i = std::stol(tok[j], &used);
        if (used != tok[j].size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("tensor file line " + std::to_string(lineno) + ": bad index '" + tok[j] + "'");
      }
      if (i < 1 || i > d) throw ParseError("tensor file line " + std::to_string(lineno) + ": index out of range");
      t.push_back(static_cast<std::uint16_t>(i - 1));
    }
    std::sort(t.begin(), t.end());
    if (f.entries().count(t)) throw ParseError("tensor file line " + std::to_string(lineno) + ": repeated index tuple");
    try {
      f.set(t, detail::parse_scalar<T>(tok.back()));
    } catch (const std::invalid_argument& e) {
      throw ParseError("tensor file line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return f;
}

}  // namespace cchaos
