#pragma once

// Small expression language for exact Gaussian moments.
//
//   E[ abs2(z1)^2 ]           E[ J(1,1,z1) * conj(J(1,1,z2)) ]
//   E[ H(3, x1) * y2 - 1/2 ]  E[ I("kernel.txt")^2 ]
//
// Variables: z<k> = x<k> + i y<k>, zb<k> its conjugate, x<k>, y<k> independent
// standard normals (k >= 1), so E|z_k|^2 = 2. Functions: J(m, n, e) is the
// complex Hermite polynomial J_{m,n} evaluated at e (and conj(e)), H(n, e) the
// real Hermite polynomial, conj, abs2, re, im, and I("file") the multiple
// integral of a kernel file (its coordinate k is z<k+1>). Constants: rationals,
// decimals, i, sqrt2. Operators: + - * / (by constants) and ^ (integer powers).
// E[...] takes the expectation of a subexpression; a bare expression is
// wrapped in one.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "cchaos/chaos.hpp"
#include "cchaos/errors.hpp"

namespace cchaos {

/// Raised when an input file named in an expression or a config cannot be opened.
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace expr {

inline constexpr unsigned kSymbolicDegree = 8;

using C = Complex<QSqrt2>;
using Poly = Polynomial<C>;

struct Token {
  enum Kind { number, ident, string, op, end } kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      out.push_back({Token::number, s.substr(i, j - i), i});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::ident, s.substr(i, j - i), i});
      i = j;
    } else if (c == '"') {
      const std::size_t j = s.find('"', i + 1);
      if (j == std::string::npos) throw ParseError("unterminated string at offset " + std::to_string(i));
      out.push_back({Token::string, s.substr(i + 1, j - i - 1), i});
      i = j + 1;
    } else if (std::string("+-*/^()[],").find(c) != std::string::npos) {
      out.push_back({Token::op, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' at offset " + std::to_string(i));
    }
  }
  out.push_back({Token::end, "", s.size()});
  return out;
}

/// Variable reference: kind in {z, zb, x, y}, 1-based index.
inline bool parse_variable(const std::string& id, std::string& kind, std::size_t& index) {
  for (const char* k : {"zb", "z", "x", "y"}) {
    const std::string p(k);
    if (id.size() > p.size() && id.compare(0, p.size(), p) == 0) {
      const std::string rest = id.substr(p.size());
      if (rest.find_first_not_of("0123456789") != std::string::npos || rest[0] == '0') continue;
      kind = p;
      index = std::stoul(rest);
      return true;
    }
  }
  return false;
}

class Parser {
 public:
  Parser(const std::string& text, std::filesystem::path base) : toks_(tokenize(text)), base_(std::move(base)) {
    // first pass: number of complex coordinates
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      std::string kind;
      std::size_t idx;
      if (toks_[i].kind == Token::ident && parse_variable(toks_[i].text, kind, idx)) K_ = std::max(K_, idx);
      if (toks_[i].kind == Token::string) K_ = std::max(K_, load(toks_[i].text).dim());
    }
    if (K_ == 0) K_ = 1;
  }

  std::size_t complex_dim() const { return K_; }

  Poly parse() {
    Poly p = sum();
    if (peek().kind != Token::end) fail("unexpected '" + peek().text + "'");
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(const std::string& op) {
    if (peek().kind == Token::op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& op) {
    if (!accept(op)) fail("expected '" + op + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(peek().pos));
  }

  static void check_degree(const Poly& p) {
    if (p.degree() > kWickDegreeBudget)
      throw BudgetExceeded("expression degree " + std::to_string(p.degree()) + " exceeds the pairing budget " +
                           std::to_string(kWickDegreeBudget));
  }

  Poly constant(const C& c) const { return Poly::constant(2 * K_, c); }
  Poly real_var(std::size_t j) const { return Poly::variable(2 * K_, j); }
  Poly x(std::size_t k) const { return real_var(k); }
  Poly y(std::size_t k) const { return real_var(K_ + k); }
  static Poly conj_poly(const Poly& p) {
    return p.map_coefficients([](const C& c) { return conj(c); });
  }
  static C i_unit() { return {QSqrt2(0), QSqrt2(1)}; }

  Poly sum() {
    Poly p = product();
    while (true) {
      if (accept("+"))
        p += product();
      else if (accept("-"))
        p -= product();
      else
        return p;
    }
  }

  Poly product() {
    Poly p = unary();
    while (true) {
      if (accept("*")) {
        p = p * unary();
        check_degree(p);
      } else if (accept("/")) {
        const Poly d = unary();
        if (d.degree() != 0 || d.terms().empty()) fail("division only by nonzero constants");
        C inv = from_rational<C>(Rational(1));
        inv /= d.terms().begin()->second;
        p *= inv;
      } else {
        return p;
      }
    }
  }

  Poly unary() {
    if (accept("-")) {
      Poly p = unary();
      p *= C{QSqrt2(-1), QSqrt2(0)};
      return p;
    }
    if (accept("+")) return unary();
    return power();
  }

  unsigned integer() {
    if (peek().kind != Token::number || peek().text.find('.') != std::string::npos) fail("expected a nonnegative integer");
    const unsigned v = static_cast<unsigned>(std::stoul(toks_[pos_++].text));
    return v;
  }

  Poly power() {
    Poly p = atom();
    if (accept("^")) {
      const unsigned e = integer();
      if (e * p.degree() > kWickDegreeBudget)
        throw BudgetExceeded("power exceeds the pairing budget " + std::to_string(kWickDegreeBudget));
      p = p.pow(e);
    }
    return p;
  }

  void symbolic_bound(unsigned deg) const {
    if (deg > kSymbolicDegree)
      throw BudgetExceeded("Hermite degree " + std::to_string(deg) + " exceeds the symbolic bound " +
                           std::to_string(kSymbolicDegree));
  }

  Poly atom() {
    const Token t = peek();
    if (t.kind == Token::number) {
      ++pos_;
      try {
        return constant(from_rational<C>(parse_rational(t.text)));
      } catch (const std::exception&) {
        fail("bad number '" + t.text + "'");
      }
    }
    if (accept("(")) {
      Poly p = sum();
      expect(")");
      return p;
    }
    if (t.kind != Token::ident) fail("unexpected '" + t.text + "'");
    ++pos_;
    std::string kind;
    std::size_t idx;
    if (t.text == "E") {
      expect("[");
      const Poly p = sum();
      expect("]");
      return constant(exact_moment(p));
    }
    if (t.text == "i") return constant(i_unit());
    if (t.text == "sqrt2") return constant(C{QSqrt2::sqrt2(), QSqrt2(0)});
    if (parse_variable(t.text, kind, idx)) {
      const std::size_t k = idx - 1;
      if (kind == "x") return x(k);
      if (kind == "y") return y(k);
      Poly iy = y(k);
      iy *= kind == "z" ? i_unit() : conj(i_unit());
      return x(k) + iy;
    }
    if (t.text == "conj" || t.text == "abs2" || t.text == "re" || t.text == "im") {
      expect("(");
      Poly p = sum();
      expect(")");
      if (t.text == "conj") return conj_poly(p);
      if (t.text == "abs2") {
        Poly r = p * conj_poly(p);
        check_degree(r);
        return r;
      }
      Poly r = p + (t.text == "re" ? conj_poly(p) : conj_poly(p) * C{QSqrt2(-1), QSqrt2(0)});
      r *= t.text == "re" ? C{QSqrt2(Rational(1, 2)), QSqrt2(0)} : C{QSqrt2(0), QSqrt2(Rational(-1, 2))};
      return r;
    }
    if (t.text == "J") {
      expect("(");
      const unsigned m = integer();
      expect(",");
      const unsigned n = integer();
      expect(",");
      Poly w = sum();
      expect(")");
      symbolic_bound(m + n);
      return substitute(complex_hermite(m, n).poly(), w, conj_poly(w));
    }
    if (t.text == "H") {
      expect("(");
      const unsigned n = integer();
      expect(",");
      Poly w = sum();
      expect(")");
      symbolic_bound(n);
      std::vector<C> coeffs;
      for (const auto& c : real_hermite_coeffs(n)) coeffs.push_back(from_rational<C>(c));
      Poly r = compose(coeffs, w);
      check_degree(r);
      return r;
    }
    if (t.text == "I") {
      expect("(");
      if (peek().kind != Token::string) fail("I expects a quoted kernel file name");
      const std::string name = toks_[pos_++].text;
      expect(")");
      const auto& phi = load(name);
      symbolic_bound(phi.m() + phi.n());
      const auto g = to_gauss_poly(phi);
      std::vector<std::size_t> target(2 * phi.dim());
      for (std::size_t k = 0; k < phi.dim(); ++k) {
        target[k] = k;
        target[phi.dim() + k] = K_ + k;
      }
      return g.embed(2 * K_, target);
    }
    fail("unknown name '" + t.text + "'");
  }

  /// p(z, zbar) with z -> w, zbar -> wb.
  Poly substitute(const Polynomial<QComplex>& p, const Poly& w, const Poly& wb) const {
    Poly out(2 * K_);
    for (const auto& [e, c] : p.terms()) {
      Poly term = constant(C{QSqrt2(c.re), QSqrt2(c.im)});
      term = term * w.pow(e[0]) * wb.pow(e[1]);
      out += term;
    }
    check_degree(out);
    return out;
  }

  const ComplexKernel<Rational>& load(const std::string& name) {
    auto it = kernels_.find(name);
    if (it != kernels_.end()) return it->second;
    std::filesystem::path p(name);
    if (p.is_relative()) p = base_ / p;
    std::ifstream in(p);
    if (!in) throw MissingInput("cannot open kernel file " + p.string());
    return kernels_.emplace(name, read_kernel<Rational>(in)).first->second;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::filesystem::path base_;
  std::size_t K_ = 0;
  std::map<std::string, ComplexKernel<Rational>> kernels_;
};

/// Exact expectation of an expression; kernel paths resolve against `base`.
inline C evaluate(const std::string& text, const std::filesystem::path& base = ".") {
  Parser p(text, base);
  const Poly poly = p.parse();
  return exact_moment(poly);
}

}  // namespace expr
}  // namespace cchaos
