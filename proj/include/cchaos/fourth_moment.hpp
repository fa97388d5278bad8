#pragma once

// Fourth-moment experiment harness: block-kernel sequences, Monte Carlo and
// exact moment reports, target moments of the limit laws, and verdicts.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cchaos/chaos.hpp"
#include "cchaos/tensor.hpp"

namespace cchaos {

// ---- chaos variables -------------------------------------------------------

/// F = sqrt(scale2) * sum_i I_{m_i,n_i}(parts[i]); all parts share one dimension.
struct ChaosVariable {
  std::vector<ComplexKernel<Rational>> parts;
  Rational scale2{1};

  std::size_t dim() const {
    if (parts.empty()) throw ShapeError("chaos variable has no kernels");
    return parts.front().dim();
  }
  /// m + n, when every part has the same total degree.
  unsigned total_degree() const {
    const unsigned l = parts.at(0).m() + parts.at(0).n();
    for (const auto& p : parts)
      if (p.m() + p.n() != l) throw ShapeError("chaos variable mixes total degrees");
    return l;
  }
  bool single_bidegree() const {
    for (const auto& p : parts)
      if (p.m() != parts.at(0).m() || p.n() != parts.at(0).n()) return false;
    return true;
  }
  void validate() const {
    const std::size_t d = dim();
    for (const auto& p : parts)
      if (p.dim() != d) throw ShapeError("chaos variable parts differ in dimension");
    if (sgn(scale2) <= 0) throw std::domain_error("chaos variable scale must be positive");
  }
};

/// phi_k = k^{-1/2} sum_{j<k} e_j^{(x)m} (x) conj(e_j)^{(x)n}: one coordinate per block.
inline ChaosVariable gen_block_kernel(unsigned m, unsigned n, std::size_t k) {
  if (m + n < 2) throw std::invalid_argument("block kernels need m + n >= 2");
  if (k < 1) throw std::invalid_argument("block kernels need k >= 1");
  ComplexKernel<Rational> phi(m, n, k);
  for (std::size_t j = 0; j < k; ++j)
    phi.set(Tuple(m, static_cast<std::uint16_t>(j)), Tuple(n, static_cast<std::uint16_t>(j)), QComplex(1));
  return {{phi}, Rational(1, static_cast<unsigned long>(k))};
}

/// Several bidegrees stacked on the same blocks (one multichaos element per k).
inline ChaosVariable gen_block_sum(const std::vector<std::pair<unsigned, unsigned>>& bidegrees, std::size_t k) {
  if (bidegrees.empty()) throw std::invalid_argument("block sum needs at least one bidegree");
  ChaosVariable out;
  for (auto [m, n] : bidegrees) out.parts.push_back(gen_block_kernel(m, n, k).parts.front());
  out.scale2 = Rational(1, static_cast<unsigned long>(k));
  return out;
}

// ---- moment reports --------------------------------------------------------

enum class Quantity { abs2, sq, abs4, fourth, t3 };
inline constexpr std::array<Quantity, 5> kQuantities{Quantity::abs2, Quantity::sq, Quantity::abs4, Quantity::fourth,
                                                     Quantity::t3};

inline const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::abs2: return "E|F|^2";
    case Quantity::sq: return "E[F^2]";
    case Quantity::abs4: return "E|F|^4";
    case Quantity::fourth: return "E[F^4]";
    case Quantity::t3: return "E[F^3+3|F|^2conj(F)]";
  }
  return "?";
}

/// Whether a quantity is real by construction.
inline bool quantity_is_real(Quantity q) { return q == Quantity::abs2 || q == Quantity::abs4; }

struct MomentEstimate {
  std::complex<double> value;
  double stderr_ = 0;
};

struct MomentReport {
  std::array<MomentEstimate, 5> q{};
  std::size_t N = 0;
  std::uint64_t seed = 0;
  bool exact = false;

  const MomentEstimate& operator[](Quantity k) const { return q[static_cast<std::size_t>(k)]; }
  MomentEstimate& operator[](Quantity k) { return q[static_cast<std::size_t>(k)]; }
};

/// Mergeable mean / sum of squared deviations for complex samples.
struct SampleStats {
  std::size_t n = 0;
  std::complex<double> mean = 0;
  double m2 = 0;  // sum |x - mean|^2

  void push(std::complex<double> x) {
    ++n;
    const std::complex<double> d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += std::real(d * std::conj(x - mean));
  }
  void merge(const SampleStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const std::complex<double> d = o.mean - mean;
    mean += d * (nb / nt);
    m2 += o.m2 + std::norm(d) * na * nb / nt;
    n += o.n;
  }
  /// sqrt(sum |x - mean|^2 / (n - 1)) / sqrt(n).
  double standard_error() const {
    if (n < 2) return 0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

inline constexpr std::size_t kMonteCarloChunk = 4096;

/// Runs f(index, sample, out) on samples 0..N-1 and returns per-slot statistics.
/// Chunks are reduced in index order, so the result does not depend on the
/// number of workers.
template <class F>
std::vector<SampleStats> monte_carlo(std::size_t dim, std::size_t N, std::uint64_t seed, unsigned workers,
                                     std::size_t slots, F&& f) {
  if (N < 2) throw std::invalid_argument("Monte Carlo needs N >= 2");
  if (workers == 0) workers = 1;
  const std::size_t chunks = (N + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<std::vector<SampleStats>> partial(chunks, std::vector<SampleStats>(slots));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto run = [&] {
    std::vector<std::complex<double>> out(slots);
    try {
      for (std::size_t c = next++; c < chunks && !failed; c = next++) {
        const std::size_t lo = c * kMonteCarloChunk, hi = std::min(N, lo + kMonteCarloChunk);
        for (std::size_t i = lo; i < hi; ++i) {
          f(i, sample_at(dim, seed, i), out.data());
          for (std::size_t j = 0; j < slots; ++j) partial[c][j].push(out[j]);
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<SampleStats> total(slots);
  for (const auto& chunk : partial)
    for (std::size_t j = 0; j < slots; ++j) total[j].merge(chunk[j]);
  return total;
}

/// Pathwise evaluator of a chaos variable.
class ChaosVariableEvaluator {
 public:
  explicit ChaosVariableEvaluator(const ChaosVariable& F) : scale_(std::sqrt(F.scale2.get_d())) {
    F.validate();
    for (const auto& p : F.parts) parts_.emplace_back(p);
  }
  std::complex<double> operator()(const GaussianSample& s) const {
    std::complex<double> acc = 0;
    for (const auto& e : parts_) acc += e(s);
    return acc * scale_;
  }

 private:
  double scale_;
  std::vector<ComplexEvaluator> parts_;
};

namespace detail {

inline void moment_slots(std::complex<double> F, std::complex<double>* out) {
  const double a = std::norm(F);
  const std::complex<double> f2 = F * F;
  out[0] = a;
  out[1] = f2;
  out[2] = a * a;
  out[3] = f2 * f2;
  out[4] = f2 * F + 3.0 * a * std::conj(F);
}

inline MomentReport report_from(const SampleStats* st, std::size_t N, std::uint64_t seed) {
  MomentReport r;
  r.N = N;
  r.seed = seed;
  for (std::size_t j = 0; j < 5; ++j) {
    r.q[j].value = st[j].mean;
    r.q[j].stderr_ = st[j].standard_error();
  }
  return r;
}

}  // namespace detail

/// Monte Carlo moment report. If `values` is given it receives F at every sample.
inline MomentReport estimate(const ChaosVariable& F, std::size_t N, std::uint64_t seed, unsigned workers = 1,
                             std::vector<std::complex<double>>* values = nullptr) {
  const ChaosVariableEvaluator ev(F);
  if (values) values->assign(N, 0);
  auto st = monte_carlo(F.dim(), N, seed, workers, 5, [&](std::size_t i, const GaussianSample& s, std::complex<double>* out) {
    const auto f = ev(s);
    if (values) (*values)[i] = f;
    detail::moment_slots(f, out);
  });
  return detail::report_from(st.data(), N, seed);
}

/// Exact moments of G = sum_i I(parts[i]); F = sqrt(scale2) G.
struct ExactMoments {
  using Value = Complex<QSqrt2>;
  Value abs2, sq, abs4, fourth, t3;
  Rational scale2{1};

  /// Scaled values whose scale factor is a rational power (all but T3).
  Value scaled(Quantity q) const {
    const Rational s2 = scale2 * scale2;
    switch (q) {
      case Quantity::abs2: return abs2 * QSqrt2(scale2);
      case Quantity::sq: return sq * QSqrt2(scale2);
      case Quantity::abs4: return abs4 * QSqrt2(s2);
      case Quantity::fourth: return fourth * QSqrt2(s2);
      case Quantity::t3: break;
    }
    throw std::invalid_argument("T3 carries scale2^(3/2); use value()");
  }
  std::complex<double> value(Quantity q) const {
    if (q == Quantity::t3) return to_std(t3) * std::pow(scale2.get_d(), 1.5);
    return to_std(scaled(q));
  }
};

inline Polynomial<Complex<QSqrt2>> gauss_poly(const ChaosVariable& F) {
  F.validate();
  Polynomial<Complex<QSqrt2>> g(2 * F.dim());
  for (const auto& p : F.parts) g += to_gauss_poly(p);
  return g;
}

/// Exact moments through the pairing oracle; needs 4 * (m + n) <= budget.
inline ExactMoments exact_moments(const ChaosVariable& F, unsigned budget = kWickDegreeBudget) {
  const auto G = gauss_poly(F);
  if (4 * G.degree() > budget)
    throw BudgetExceeded("fourth moments need Gaussian degree " + std::to_string(4 * G.degree()) + " > budget " +
                         std::to_string(budget));
  using C = Complex<QSqrt2>;
  const auto Gb = G.map_coefficients([](const C& c) { return conj(c); });
  const auto A = G * Gb;
  const auto G2 = G * G;
  ExactMoments m;
  m.scale2 = F.scale2;
  m.abs2 = exact_moment(A, budget);
  m.sq = exact_moment(G2, budget);
  m.abs4 = exact_moment(A * A, budget);
  m.fourth = exact_moment(G2 * G2, budget);
  auto t3 = G2 * G;
  auto cross = A * Gb;
  cross *= C{QSqrt2(3), QSqrt2(0)};
  t3 += cross;
  m.t3 = exact_moment(t3, budget);
  return m;
}

inline MomentReport exact_report(const ExactMoments& m) {
  MomentReport r;
  r.exact = true;
  for (auto q : kQuantities) r[q].value = m.value(q);
  return r;
}

// ---- criteria --------------------------------------------------------------

enum class Case {
  gaussian_offdiag,
  gaussian_diag,
  gaussian_degenerate,
  chi2_offdiag,
  chi2_diag,
  multichaos,
  multichaos_chi2,
};

inline const char* case_name(Case c) {
  switch (c) {
    case Case::gaussian_offdiag: return "gaussian-offdiag";
    case Case::gaussian_diag: return "gaussian-diag";
    case Case::gaussian_degenerate: return "gaussian-degenerate";
    case Case::chi2_offdiag: return "chi2-offdiag";
    case Case::chi2_diag: return "chi2-diag";
    case Case::multichaos: return "multichaos";
    case Case::multichaos_chi2: return "multichaos-chi2";
  }
  return "?";
}

inline Case parse_case(const std::string& s) {
  for (Case c : {Case::gaussian_offdiag, Case::gaussian_diag, Case::gaussian_degenerate, Case::chi2_offdiag,
                 Case::chi2_diag, Case::multichaos, Case::multichaos_chi2})
    if (s == case_name(c)) return c;
  throw std::invalid_argument("unknown criterion case '" + s + "'");
}

inline bool is_chi2(Case c) { return c == Case::chi2_offdiag || c == Case::chi2_diag || c == Case::multichaos_chi2; }

struct CriterionSpec {
  Case tag = Case::gaussian_offdiag;
  double sigma2 = 1;
  /// E[F^2] -> sigma2 (a + ib). Unset means: estimate from the last report.
  std::optional<double> a, b;
  /// Degrees of freedom of the two centered chi-square parts; unset means
  /// ((1+a) sigma2 / 4, (1-a) sigma2 / 4).
  std::optional<std::array<double, 2>> chi2_dof;
};

/// Raised for criteria that contradict themselves or the kernel.
struct CriterionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Checks a criterion against the bidegree (m, n) of the sequence (total degree l = m + n;
/// pass m = n = 0 with l set for mixed-bidegree sequences).
inline void validate_criterion(const CriterionSpec& c, unsigned l, std::optional<bool> diagonal) {
  if (!(c.sigma2 > 0)) throw CriterionError("sigma2 must be positive");
  const double a = c.a.value_or(0), b = c.b.value_or(0);
  const double r = a * a + b * b;
  if (r > 1 + 1e-12) throw CriterionError("a^2 + b^2 must not exceed 1");
  if (l < 2) throw CriterionError("the chaos degree m + n must be at least 2");
  if (is_chi2(c.tag)) {
    if (l % 2)
      throw CriterionError(
          "chi-square target with odd m + n = " + std::to_string(l) +
          ": no sequence with bounded variances in an odd-degree chaos converges to a centered chi-square law");
    if (r >= 1) throw CriterionError("chi-square targets need a^2 + b^2 < 1");
    if (b != 0) throw CriterionError("chi-square limits have real E[F^2]; b must be 0");
    if (c.chi2_dof && !((*c.chi2_dof)[0] > 0 && (*c.chi2_dof)[1] > 0))
      throw CriterionError("chi-square degrees of freedom must be positive");
  }
  switch (c.tag) {
    case Case::gaussian_offdiag:
    case Case::chi2_offdiag:
      if (diagonal && *diagonal) throw CriterionError(std::string(case_name(c.tag)) + " needs m != n");
      if (r != 0) throw CriterionError("off-diagonal chaoses have E[F^2] = 0; a and b must be 0");
      break;
    case Case::gaussian_diag:
    case Case::chi2_diag:
      if (diagonal && !*diagonal) throw CriterionError(std::string(case_name(c.tag)) + " needs m = n");
      if (c.tag == Case::chi2_diag && !c.a) throw CriterionError("chi2-diag needs a");
      break;
    case Case::gaussian_degenerate:
      if (diagonal && !*diagonal) throw CriterionError("gaussian-degenerate needs m = n");
      if (c.a && std::abs(r - 1) > 1e-12) throw CriterionError("gaussian-degenerate needs a^2 + b^2 = 1");
      break;
    case Case::multichaos:
    case Case::multichaos_chi2: break;
  }
}

enum class Role { hypothesis, criterion, info };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::hypothesis: return "hypothesis";
    case Role::criterion: return "criterion";
    case Role::info: return "info";
  }
  return "?";
}

struct Target {
  Quantity q;
  Role role;
  std::complex<double> value;
  /// The customary closed form of the limit, when it differs from the configured law (chi-square cases).
  std::optional<std::complex<double>> stated;
};

/// Moments of a centered chi-square variable chi2_nu - nu.
struct CenteredChi2Moments {
  double m2, m3, m4;
  explicit CenteredChi2Moments(double nu) : m2(2 * nu), m3(8 * nu), m4(12 * nu * nu + 48 * nu) {}
};

/// Target moments for a resolved case with known a, b.
inline std::vector<Target> targets(Case tag, double sigma2, double a, double b,
                                   std::optional<std::array<double, 2>> dof = std::nullopt) {
  using cd = std::complex<double>;
  const double s4 = sigma2 * sigma2;
  const cd w(a, b);
  std::vector<Target> out;
  if (!is_chi2(tag)) {
    const bool degenerate = tag == Case::gaussian_degenerate;
    const bool offdiag = tag == Case::gaussian_offdiag;
    out.push_back({Quantity::abs2, Role::hypothesis, sigma2, {}});
    out.push_back({Quantity::sq, offdiag ? Role::info : Role::hypothesis, sigma2 * w, {}});
    out.push_back({Quantity::abs4, Role::criterion, (std::norm(w) + 2) * s4, {}});
    out.push_back({Quantity::fourth, degenerate ? Role::criterion : Role::info, 3.0 * w * w * s4, {}});
    out.push_back({Quantity::t3, Role::info, 0.0, {}});
    return out;
  }
  const std::array<double, 2> nu = dof.value_or(std::array<double, 2>{(1 + a) * sigma2 / 4, (1 - a) * sigma2 / 4});
  const CenteredChi2Moments g1(nu[0]), g2(nu[1]);
  const bool offdiag = tag == Case::chi2_offdiag;
  out.push_back({Quantity::abs2, Role::hypothesis, g1.m2 + g2.m2, sigma2});
  out.push_back({Quantity::sq, offdiag ? Role::info : Role::hypothesis, g1.m2 - g2.m2, sigma2 * a});
  out.push_back({Quantity::abs4, Role::criterion, g1.m4 + 2 * g1.m2 * g2.m2 + g2.m4, (2 + a * a) * s4 + 24 * sigma2});
  out.push_back({Quantity::fourth, Role::info, g1.m4 - 6 * g1.m2 * g2.m2 + g2.m4, {}});
  out.push_back({Quantity::t3, Role::criterion, 4.0 * cd(g1.m3, -g2.m3), 8.0 * cd(1 + a, -(1 - a)) * sigma2});
  return out;
}

// ---- verdicts --------------------------------------------------------------

/// |estimate - target| <= max(5 SE, 0.02 |target| + 0.01).
inline double verdict_tolerance(double se, std::complex<double> target) {
  return std::max(5 * se, 0.02 * std::abs(target) + 0.01);
}

struct QuantityVerdict {
  Target target;
  std::vector<std::complex<double>> estimates;
  std::vector<double> stderrs;
  std::vector<double> gaps;
  std::vector<bool> pass_at;
  bool nonincreasing = true;
  bool pass = false;
};

struct Verdict {
  Case requested;
  Case resolved;
  double sigma2, a, b;
  std::string note;
  std::vector<std::size_t> ks;
  std::vector<QuantityVerdict> quantities;
  bool pass = false;
};

inline QuantityVerdict judge(const Target& t, const std::vector<MomentReport>& reports) {
  QuantityVerdict v{t, {}, {}, {}, {}, true, false};
  for (const auto& r : reports) {
    const auto& e = r[t.q];
    const double gap = std::abs(e.value - t.value);
    v.estimates.push_back(e.value);
    v.stderrs.push_back(e.stderr_);
    v.gaps.push_back(gap);
    v.pass_at.push_back(gap <= verdict_tolerance(e.stderr_, t.value));
  }
  for (std::size_t j = 1; j < v.gaps.size(); ++j) {
    const double noise = 5 * std::hypot(v.stderrs[j - 1], v.stderrs[j]) + 1e-12 * (1 + std::abs(t.value));
    if (v.gaps[j] > v.gaps[j - 1] + noise) v.nonincreasing = false;
  }
  v.pass = !v.pass_at.empty() && v.pass_at.back() && v.nonincreasing;
  return v;
}

/// Verdict for a sequence of reports ordered by k. Off-diagonal / diagonal is
/// taken from `diagonal` when known; diagonal Gaussian cases whose a, b are
/// unset are resolved from E[F^2] / E|F|^2 at the last index, and routed to
/// the degenerate case when |E[F^2]| matches E|F|^2 within tolerance.
inline Verdict verdict(const std::vector<std::size_t>& ks, const std::vector<MomentReport>& reports,
                       const CriterionSpec& spec, unsigned l, std::optional<bool> diagonal = std::nullopt) {
  if (ks.size() != reports.size() || reports.empty()) throw std::invalid_argument("verdict needs one report per k");
  for (std::size_t j = 1; j < ks.size(); ++j)
    if (ks[j] <= ks[j - 1]) throw std::invalid_argument("reports must be ordered by increasing k");
  validate_criterion(spec, l, diagonal);
  Verdict v{spec.tag, spec.tag, spec.sigma2, spec.a.value_or(0), spec.b.value_or(0), "", ks, {}, false};
  const bool gaussian_diag = spec.tag == Case::gaussian_diag || spec.tag == Case::gaussian_degenerate ||
                             spec.tag == Case::multichaos;
  if (gaussian_diag && !spec.a) {
    const auto& last = reports.back();
    const auto abs2 = last[Quantity::abs2], sq = last[Quantity::sq];
    if (abs2.value.real() <= 0) throw std::domain_error("E|F|^2 estimate is not positive");
    const std::complex<double> w = sq.value / abs2.value.real();
    const double gap = std::abs(std::abs(sq.value) - abs2.value.real());
    const bool degenerate = gap <= verdict_tolerance(std::hypot(sq.stderr_, abs2.stderr_), abs2.value.real());
    if (degenerate) {
      const std::complex<double> u = std::abs(w) > 0 ? w / std::abs(w) : std::complex<double>(1, 0);
      v.a = u.real();
      v.b = u.imag();
      if (spec.tag != Case::multichaos) v.resolved = Case::gaussian_degenerate;
      v.note = "|E[F^2]| matches E|F|^2: degenerate covariance, fourth-power condition added";
    } else {
      v.a = w.real();
      v.b = w.imag();
      if (spec.tag == Case::gaussian_degenerate) v.note = "requested degenerate case but |E[F^2]| < E|F|^2";
      if (spec.tag != Case::multichaos) v.resolved = Case::gaussian_diag;
    }
  } else if (spec.tag == Case::gaussian_diag && std::abs(v.a * v.a + v.b * v.b - 1) <= 1e-12) {
    v.resolved = Case::gaussian_degenerate;
    v.note = "a^2 + b^2 = 1: degenerate covariance, fourth-power condition added";
  }
  Case law = v.resolved;
  if (law == Case::multichaos) law = Case::gaussian_diag;
  if (law == Case::multichaos_chi2) law = Case::chi2_diag;
  v.pass = true;
  for (const auto& t : targets(law, v.sigma2, v.a, v.b, spec.chi2_dof)) {
    v.quantities.push_back(judge(t, reports));
    if (t.role != Role::info && !v.quantities.back().pass) v.pass = false;
  }
  return v;
}

// ---- contractions of the real decomposition --------------------------------

/// max_r |u (x)_r u| and max_r |v (x)_r v| over r = 1..l-1 for F = U + iV,
/// computed exactly on the decomposed kernels and returned in double.
inline std::pair<double, double> contraction_norms(const ChaosVariable& F) {
  const unsigned l = F.total_degree();
  SymTensor<QSqrt2> u(l, 2 * F.dim()), v(l, 2 * F.dim());
  for (const auto& p : F.parts) {
    auto [pu, pv] = decompose(p);
    u += pu;
    v += pv;
  }
  double mu = 0, mv = 0;
  const double s2 = F.scale2.get_d();
  for (unsigned r = 1; r < l; ++r) {
    mu = std::max(mu, std::sqrt(norm2(contract(u, u, r)).to_double()) * s2);
    mv = std::max(mv, std::sqrt(norm2(contract(v, v, r)).to_double()) * s2);
  }
  return {mu, mv};
}

// ---- multivariate ----------------------------------------------------------

/// Cross moments E[F_j^2 F_i] and E[|F_j|^2 F_i] for every ordered pair with l_i = 2 l_j.
struct CrossMoment {
  std::size_t i, j;
  MomentEstimate sq, abs2;
};

struct MultiReport {
  std::vector<MomentReport> components;
  std::vector<CrossMoment> cross;
};

inline void validate_degrees(const std::vector<unsigned>& l) {
  if (l.size() < 2) throw CriterionError("multivariate criteria need at least two components");
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = i + 1; j < l.size(); ++j)
      if (l[i] == l[j])
        throw CriterionError("multivariate components need pairwise distinct total degrees (component " +
                             std::to_string(i + 1) + " and " + std::to_string(j + 1) + " both have degree " +
                             std::to_string(l[i]) + ")");
}

inline MultiReport estimate_joint(const std::vector<ChaosVariable>& comps, std::size_t N, std::uint64_t seed,
                                  unsigned workers = 1) {
  std::vector<unsigned> l;
  for (const auto& c : comps) l.push_back(c.total_degree());
  validate_degrees(l);
  const std::size_t dim = comps.front().dim();
  std::vector<ChaosVariableEvaluator> ev;
  for (const auto& c : comps) {
    if (c.dim() != dim) throw ShapeError("multivariate components differ in dimension");
    ev.emplace_back(c);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (std::size_t j = 0; j < comps.size(); ++j)
      if (l[i] == 2 * l[j]) pairs.emplace_back(i, j);
  const std::size_t d = comps.size(), slots = 5 * d + 2 * pairs.size();
  auto st = monte_carlo(dim, N, seed, workers, slots, [&](std::size_t, const GaussianSample& s, std::complex<double>* out) {
    thread_local std::vector<std::complex<double>> f;
    f.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
      f[c] = ev[c](s);
      detail::moment_slots(f[c], out + 5 * c);
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      out[5 * d + 2 * p] = f[j] * f[j] * f[i];
      out[5 * d + 2 * p + 1] = std::norm(f[j]) * f[i];
    }
  });
  MultiReport r;
  for (std::size_t c = 0; c < d; ++c) r.components.push_back(detail::report_from(st.data() + 5 * c, N, seed));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& a = st[5 * d + 2 * p];
    const auto& b = st[5 * d + 2 * p + 1];
    r.cross.push_back({pairs[p].first, pairs[p].second, {a.mean, a.standard_error()}, {b.mean, b.standard_error()}});
  }
  return r;
}

// ---- Kolmogorov-Smirnov ----------------------------------------------------

struct KsResult {
  double distance;
  double p_value;
  std::size_t n;
  /// Distance of at least 1/2: the sample and the target barely overlap.
  bool maximal_mismatch;
};

/// Asymptotic Kolmogorov tail P(K > lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

/// Two-sided one-sample KS statistic against `cdf`, with the p-value from the
/// Kolmogorov limit law at the small-sample corrected argument
/// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D.
inline KsResult ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.size() < 100) throw std::invalid_argument("KS distance needs at least 100 samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d), x.size(), d >= 0.5};
}

/// CDF of N(mean, var); rejects var <= 0.
inline std::function<double(double)> normal_cdf_fn(double mean, double var) {
  if (!(var > 0)) throw std::domain_error("degenerate normal target (variance must be positive)");
  const double sd = std::sqrt(var);
  return [=](double x) { return normal_cdf((x - mean) / sd); };
}

/// CDF of chi2_nu - nu; rejects nu <= 0.
inline std::function<double(double)> centered_chi2_cdf_fn(double nu) {
  if (!(nu > 0)) throw std::domain_error("degenerate chi-square target (degrees of freedom must be positive)");
  return [=](double x) {
    const double y = x + nu;
    return y <= 0 ? 0.0 : boost::math::gamma_p(nu / 2, y / 2);
  };
}

}  // namespace cchaos
