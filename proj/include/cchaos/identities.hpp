#pragma once

// Exact identity suites over the Hermite / conversion machinery, with the
// complex Hermite polynomials drawn from a replaceable provider so a broken
// J_{m,n} is caught and named.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cchaos/convert.hpp"
#include "cchaos/hermite.hpp"

namespace cchaos {

inline constexpr unsigned kIdentityMaxDegree = 8;

/// (m, n) -> J_{m,n} in the z/zbar form.
using JProvider = std::function<BiPoly<Rational>(unsigned, unsigned)>;

inline JProvider standard_j() {
  return [](unsigned m, unsigned n) { return complex_hermite(m, n); };
}

/// Provider that returns a corrupted J_{m,n} (leading coefficient doubled).
inline JProvider tampered_j(unsigned tm, unsigned tn, JProvider base = standard_j()) {
  return [=](unsigned m, unsigned n) {
    auto j = base(m, n);
    if (m == tm && n == tn) j = j + BiPoly<Rational>::monomial(BiForm::z_zbar, m, n, QComplex(1));
    return j;
  };
}

struct IdentityResult {
  std::string suite;
  unsigned degree;
  bool pass;
  std::string detail;
};

struct IdentityReport {
  unsigned max_degree = 0;
  std::vector<IdentityResult> results;

  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
  std::vector<std::string> suites() const {
    std::vector<std::string> out;
    for (const auto& r : results)
      if (out.empty() || out.back() != r.suite) out.push_back(r.suite);
    return out;
  }
};

namespace detail {

using P = BiPoly<Rational>;

inline std::string jname(unsigned m, unsigned n) { return "J_{" + std::to_string(m) + "," + std::to_string(n) + "}"; }

/// Exact angles used by the rotation identities: (cos, sin) pairs.
inline std::vector<std::pair<Rational, Rational>> exact_angles() {
  return {{Rational(1), Rational(0)},
          {Rational(3, 5), Rational(4, 5)},
          {Rational(-4, 5), Rational(3, 5)},
          {Rational(12, 13), Rational(-5, 13)},
          {Rational(0), Rational(1)}};
}

/// Rational-trig grids of degree n: the standard one and half-tangents (9-k)/(2+k).
inline std::vector<ExactThetaGrid> exact_grids(unsigned n) {
  std::vector<ExactThetaGrid> out{ExactThetaGrid::standard(n)};
  std::vector<Rational> t;
  for (unsigned k = 0; k <= n; ++k) t.push_back(Rational(9 - static_cast<long>(k), 2 + static_cast<long>(k)));
  for (auto& x : t) x.canonicalize();
  out.push_back(ExactThetaGrid::from_half_tangents(t));
  return out;
}

inline std::string check_conversion(unsigned n, const JProvider& J) {
  const auto t = h2j_table(n);
  for (unsigned m = 0; m <= n; ++m) {
    P acc(BiForm::x_y);
    for (unsigned k = 0; k <= n; ++k) acc = acc + hermite_product(k, n - k) * t.complex_to_real.at(m, k);
    if (acc != J(m, n - m).to_xy()) return jname(m, n - m) + " differs from its real Hermite expansion";
  }
  for (unsigned k = 0; k <= n; ++k) {
    P acc(BiForm::z_zbar);
    for (unsigned m = 0; m <= n; ++m) acc = acc + J(m, n - m) * t.real_to_complex.at(k, m);
    if (acc.to_xy() != hermite_product(k, n - k))
      return "H_" + std::to_string(k) + "(x)H_" + std::to_string(n - k) + "(y) not recovered from J_{m," +
             std::to_string(n) + "-m}";
  }
  const auto id1 = compose(t.complex_to_real, t.real_to_complex), id2 = compose(t.real_to_complex, t.complex_to_real);
  for (unsigned i = 0; i <= n; ++i)
    for (unsigned j = 0; j <= n; ++j)
      if (id1[i][j] != QComplex(i == j ? 1 : 0) || id2[i][j] != QComplex(i == j ? 1 : 0))
        return "table round trip is not the identity";
  return {};
}

inline std::string check_monomial(unsigned n, const JProvider& J) {
  for (unsigned r = 0; r <= n; ++r) {
    const unsigned s = n - r;
    P acc(BiForm::z_zbar);
    for (const auto& [idx, c] : expand_monomial(r, s)) acc = acc + J(idx.first, idx.second) * QComplex(c);
    if (acc != P::monomial(BiForm::z_zbar, r, s, QComplex(1)))
      return "z^" + std::to_string(r) + " zbar^" + std::to_string(s) + " not reconstructed";
  }
  return {};
}

inline std::string check_eigen(unsigned n, const JProvider& J) {
  for (const auto& [c, s] : exact_angles()) {
    if (sgn(c) <= 0) continue;  // the generator is defined for cos(theta) > 0
    for (unsigned m = 0; m <= n; ++m) {
      const auto j = J(m, n - m);
      const QComplex eig{Rational(-c * n), Rational(-s * (2 * static_cast<long>(m) - static_cast<long>(n)))};
      if (ou_apply(j, c, s, Rational(2)) != j * eig)
        return jname(m, n - m) + " is not an eigenfunction at cos=" + c.get_str() + ", sin=" + s.get_str();
    }
  }
  return {};
}

inline std::string check_rotation(unsigned n) {
  for (const auto& [c, s] : exact_angles()) {
    const auto rot = rotation_expand<Rational>(n, c, s);
    P acc(BiForm::x_y);
    for (unsigned l = 0; l <= n; ++l) acc = acc + hermite_product(l, n - l) * QComplex(rot[l]);
    if (acc != real_hermite_linear<Rational>(n, c, s))
      return "rotation expansion fails at cos=" + c.get_str() + ", sin=" + s.get_str();
  }
  return {};
}

inline std::string check_products(unsigned n) {
  for (const auto& g : exact_grids(n)) {
    const auto M = build_M(g);
    std::vector<P> rotated;
    for (unsigned k = 0; k <= n; ++k) rotated.push_back(real_hermite_linear<Rational>(n, g.cos(k), g.sin(k)));
    for (unsigned l = 0; l <= n; ++l) {
      P acc(BiForm::x_y);
      for (unsigned k = 0; k <= n; ++k) acc = acc + rotated[k] * QComplex(M.inv(l, k));
      if (acc != hermite_product(l, n - l)) return "product H_" + std::to_string(l) + " H_" + std::to_string(n - l) + " not recovered";
    }
  }
  return {};
}

inline std::string check_rotation_complex(unsigned n, const JProvider& J) {
  for (const auto& [c, s] : exact_angles()) {
    const auto d = dk_coeffs<Rational>(n, c, s);
    P acc(BiForm::z_zbar);
    for (unsigned k = 0; k <= n; ++k) acc = acc + J(k, n - k) * d[k];
    if (acc.to_xy() != real_hermite_linear<Rational>(n, c, s))
      return "H_n(x cos + y sin) != sum d_k J_{k,n-k} at cos=" + c.get_str() + ", sin=" + s.get_str();
  }
  return {};
}

inline std::string check_complex_from_rotations(unsigned n, const JProvider& J) {
  for (const auto& g : exact_grids(n)) {
    std::vector<P> rotated;
    for (unsigned i = 0; i <= n; ++i) rotated.push_back(real_hermite_linear<Rational>(n, g.cos(i), g.sin(i)));
    for (unsigned k = 0; k <= n; ++k) {
      const auto c = ci_coeffs(n, k, g);
      P acc(BiForm::x_y);
      for (unsigned i = 0; i <= n; ++i) acc = acc + rotated[i] * c[i];
      if (acc != J(k, n - k).to_xy()) return jname(k, n - k) + " not recovered from rotated H_n";
    }
  }
  return {};
}

inline std::string check_det(unsigned n) {
  for (const auto& g : exact_grids(n)) {
    const auto M = build_M(g);
    if (M.det != M.det_closed_form) return "exact determinant differs from the sine product";
  }
  const auto F = build_M(ThetaGrid::default_grid(n));
  const double rel = std::abs(F.det_lu - F.det_closed_form) / std::abs(F.det_closed_form);
  if (!(rel <= 1e-10)) return "LU determinant off by relative " + std::to_string(rel);
  if (!(F.residual <= 1e-10)) return "inverse residual " + std::to_string(F.residual);
  return {};
}

}  // namespace detail

/// Runs every suite for degrees 0..max_degree (max_degree <= 8).
inline IdentityReport run_identities(unsigned max_degree, const JProvider& J = standard_j()) {
  if (max_degree > kIdentityMaxDegree)
    throw std::out_of_range("identity suites support degrees up to " + std::to_string(kIdentityMaxDegree));
  IdentityReport rep;
  rep.max_degree = max_degree;
  auto add = [&](const std::string& suite, const std::function<std::string(unsigned)>& f) {
    for (unsigned n = 0; n <= max_degree; ++n) {
      std::string why;
      try {
        why = f(n);
      } catch (const std::exception& e) {
        why = std::string("exception: ") + e.what();
      }
      rep.results.push_back({suite, n, why.empty(), why});
    }
  };
  add("complex-real-conversion", [&](unsigned n) { return detail::check_conversion(n, J); });
  add("monomial-expansion", [&](unsigned n) { return detail::check_monomial(n, J); });
  add("eigenrelation", [&](unsigned n) { return detail::check_eigen(n, J); });
  add("rotation-expansion", [](unsigned n) { return detail::check_rotation(n); });
  add("products-from-rotations", [](unsigned n) { return detail::check_products(n); });
  add("rotation-in-complex-basis", [&](unsigned n) { return detail::check_rotation_complex(n, J); });
  add("complex-from-rotations", [&](unsigned n) { return detail::check_complex_from_rotations(n, J); });
  add("det-M", [](unsigned n) { return detail::check_det(n); });
  return rep;
}

}  // namespace cchaos
