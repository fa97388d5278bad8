#pragma once

// JSON-configured fourth-moment experiments: kernel sequences over a list of
// k, Monte Carlo or exact moment reports, verdicts, and CSV / JSON output.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cchaos/expr.hpp"
#include "cchaos/fourth_moment.hpp"

namespace cchaos {

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelSpec {
  enum class Type { block, block_sum, file, inline_kernel } type = Type::block;
  std::vector<std::pair<unsigned, unsigned>> bidegrees;  // block: one entry
  std::string path;                                      // file: may contain {k}
  std::optional<ComplexKernel<Rational>> kernel;         // inline
};

struct ComponentSpec {
  KernelSpec kernel;
  CriterionSpec criterion;
};

struct ExperimentConfig {
  std::vector<ComponentSpec> components;
  bool multivariate = false;
  std::vector<std::size_t> k;
  std::size_t N = 0;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool exact = false;
  bool ks = false;
  bool contractions = false;
  std::string output;
  std::filesystem::path base = ".";
};

namespace detail {

using json = nlohmann::ordered_json;

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline unsigned as_unsigned(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(what + " must be a nonnegative integer");
  return j.get<unsigned>();
}

inline double as_double(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

inline Rational as_rational(const json& j, const std::string& what) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const std::exception&) {
  }
  throw ConfigError(what + " must be an integer or a rational string such as \"-3/4\"");
}

inline KernelSpec parse_kernel(const json& j) {
  KernelSpec s;
  const std::string type = need(j, "type", "kernel").get<std::string>();
  if (type == "block") {
    s.type = KernelSpec::Type::block;
    s.bidegrees.emplace_back(as_unsigned(need(j, "m", "kernel"), "kernel.m"), as_unsigned(need(j, "n", "kernel"), "kernel.n"));
    if (s.bidegrees[0].first + s.bidegrees[0].second < 2) throw ConfigError("block kernels need m + n >= 2");
  } else if (type == "block_sum") {
    s.type = KernelSpec::Type::block_sum;
    const auto& b = need(j, "bidegrees", "kernel");
    if (!b.is_array() || b.empty()) throw ConfigError("kernel.bidegrees must be a nonempty array of [m, n]");
    for (const auto& e : b) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("kernel.bidegrees entries must be [m, n]");
      s.bidegrees.emplace_back(as_unsigned(e[0], "m"), as_unsigned(e[1], "n"));
      if (s.bidegrees.back().first + s.bidegrees.back().second < 2) throw ConfigError("block kernels need m + n >= 2");
    }
  } else if (type == "file") {
    s.type = KernelSpec::Type::file;
    s.path = need(j, "path", "kernel").get<std::string>();
  } else if (type == "inline") {
    s.type = KernelSpec::Type::inline_kernel;
    const unsigned m = as_unsigned(need(j, "m", "kernel"), "kernel.m"), n = as_unsigned(need(j, "n", "kernel"), "kernel.n");
    const unsigned d = as_unsigned(need(j, "dim", "kernel"), "kernel.dim");
    if (d == 0) throw ConfigError("kernel.dim must be positive");
    ComplexKernel<Rational> phi(m, n, d);
    for (const auto& e : need(j, "entries", "kernel")) {
      auto idx = [&](const char* key, unsigned len) {
        const auto& a = need(e, key, "kernel entry");
        if (!a.is_array() || a.size() != len) throw ConfigError(std::string("kernel entry \"") + key + "\" has the wrong length");
        Tuple t;
        for (const auto& v : a) {
          const unsigned x = as_unsigned(v, "kernel index");
          if (x < 1 || x > d) throw ConfigError("kernel index out of range 1.." + std::to_string(d));
          t.push_back(static_cast<std::uint16_t>(x - 1));
        }
        return t;
      };
      const Rational re = e.contains("re") ? as_rational(e.at("re"), "re") : Rational(0);
      const Rational im = e.contains("im") ? as_rational(e.at("im"), "im") : Rational(0);
      phi.add(idx("a", m), idx("b", n), QComplex{re, im});
    }
    s.kernel = phi;
  } else {
    throw ConfigError("unknown kernel type \"" + type + "\" (block, block_sum, file, inline)");
  }
  return s;
}

inline CriterionSpec parse_criterion(const json& j) {
  CriterionSpec c;
  try {
    c.tag = parse_case(need(j, "case", "criterion").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.sigma2 = as_double(need(j, "sigma2", "criterion"), "criterion.sigma2");
  if (j.contains("a")) c.a = as_double(j.at("a"), "criterion.a");
  if (j.contains("b")) c.b = as_double(j.at("b"), "criterion.b");
  if (j.contains("chi2_dof")) {
    const auto& d = j.at("chi2_dof");
    if (!d.is_array() || d.size() != 2) throw ConfigError("criterion.chi2_dof must be [nu1, nu2]");
    c.chi2_dof = std::array<double, 2>{as_double(d[0], "chi2_dof"), as_double(d[1], "chi2_dof")};
  }
  return c;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base = ".") {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  c.base = base;
  try {
    if (j.contains("components")) {
      if (j.contains("kernel")) throw ConfigError("use either \"kernel\" or \"components\"");
      c.multivariate = true;
      for (const auto& comp : j.at("components"))
        c.components.push_back({detail::parse_kernel(detail::need(comp, "kernel", "component")),
                                detail::parse_criterion(detail::need(comp, "criterion", "component"))});
      if (c.components.size() < 2) throw ConfigError("multivariate experiments need at least two components");
    } else {
      c.components.push_back({detail::parse_kernel(detail::need(j, "kernel", "config")),
                              detail::parse_criterion(detail::need(j, "criterion", "config"))});
    }
    const auto& ks = detail::need(j, "k", "config");
    if (!ks.is_array() || ks.empty()) throw ConfigError("\"k\" must be a nonempty array");
    for (const auto& k : ks) {
      const unsigned v = detail::as_unsigned(k, "k");
      if (v == 0) throw ConfigError("k values must be positive");
      if (!c.k.empty() && v <= c.k.back()) throw ConfigError("k values must be strictly increasing");
      c.k.push_back(v);
    }
    const std::string mode = j.value("mode", "monte-carlo");
    if (mode != "monte-carlo" && mode != "exact") throw ConfigError("mode must be \"monte-carlo\" or \"exact\"");
    c.exact = mode == "exact";
    if (!c.exact) {
      c.N = detail::as_unsigned(detail::need(j, "N", "config"), "N");
      if (c.N < 2) throw ConfigError("N must be at least 2");
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) c.workers = std::max(1u, detail::as_unsigned(j.at("workers"), "workers"));
    c.ks = j.value("ks", false);
    c.contractions = j.value("contractions", false);
    c.output = j.value("output", "");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
  }
  if (c.multivariate && c.exact) throw ConfigError("multivariate experiments run in monte-carlo mode only");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw MissingInput("cannot open config " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), p.parent_path().empty() ? std::filesystem::path(".") : p.parent_path());
}

/// The k-th element of a kernel sequence.
inline ChaosVariable build_variable(const KernelSpec& s, std::size_t k, const std::filesystem::path& base) {
  switch (s.type) {
    case KernelSpec::Type::block: return gen_block_kernel(s.bidegrees[0].first, s.bidegrees[0].second, k);
    case KernelSpec::Type::block_sum: return gen_block_sum(s.bidegrees, k);
    case KernelSpec::Type::inline_kernel: return {{*s.kernel}, Rational(1)};
    case KernelSpec::Type::file: {
      std::string name = s.path;
      for (std::size_t at; (at = name.find("{k}")) != std::string::npos;) name.replace(at, 3, std::to_string(k));
      std::filesystem::path p(name);
      if (p.is_relative()) p = base / p;
      std::ifstream in(p);
      if (!in) throw MissingInput("cannot open kernel file " + p.string());
      try {
        return {{read_kernel<Rational>(in)}, Rational(1)};
      } catch (const ParseError& e) {
        throw ConfigError(p.string() + ": " + e.what());
      }
    }
  }
  throw std::logic_error("unreachable kernel type");
}

// ---- output formatting -----------------------------------------------------

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// "re" for real quantities, otherwise "re+imi" / "re-imi".
inline std::string format_complex(std::complex<double> z, bool real) {
  if (real) return format_number(z.real());
  std::string im = format_number(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_number(z.real()) + im + "i";
}

struct ExperimentOutput {
  std::string csv;
  std::string json;
  bool pass = false;
};

namespace detail {

inline json complex_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline const char* quantity_id(Quantity q) {
  switch (q) {
    case Quantity::abs2: return "abs2";
    case Quantity::sq: return "sq";
    case Quantity::abs4: return "abs4";
    case Quantity::fourth: return "fourth";
    case Quantity::t3: return "t3";
  }
  return "?";
}

inline json verdict_json(const Verdict& v) {
  json out;
  out["case"] = case_name(v.requested);
  out["resolved_case"] = case_name(v.resolved);
  out["sigma2"] = v.sigma2;
  out["a"] = v.a;
  out["b"] = v.b;
  if (!v.note.empty()) out["note"] = v.note;
  out["pass"] = v.pass;
  json qs = json::array();
  for (const auto& q : v.quantities) {
    json e;
    e["id"] = quantity_id(q.target.q);
    e["name"] = quantity_name(q.target.q);
    e["role"] = role_name(q.target.role);
    e["target"] = complex_json(q.target.value);
    if (q.target.stated) e["stated_limit"] = complex_json(*q.target.stated);
    json traj = json::array();
    for (std::size_t j = 0; j < q.estimates.size(); ++j)
      traj.push_back({{"k", v.ks[j]},
                      {"estimate", complex_json(q.estimates[j])},
                      {"stderr", q.stderrs[j]},
                      {"gap", q.gaps[j]},
                      {"tolerance", verdict_tolerance(q.stderrs[j], q.target.value)},
                      {"pass", static_cast<bool>(q.pass_at[j])}});
    e["trajectory"] = traj;
    e["nonincreasing"] = q.nonincreasing;
    e["pass"] = q.pass;
    qs.push_back(e);
  }
  out["quantities"] = qs;
  return out;
}

inline void csv_rows(std::ostringstream& csv, const std::string& prefix, const std::vector<std::size_t>& ks,
                     const Verdict& v) {
  for (std::size_t j = 0; j < ks.size(); ++j)
    for (auto q : kQuantities)
      for (const auto& qv : v.quantities) {
        if (qv.target.q != q) continue;
        const bool real = quantity_is_real(q);
        csv << ks[j] << ',' << prefix << quantity_id(q) << ',' << format_complex(qv.estimates[j], real) << ','
            << format_number(qv.stderrs[j]) << ',' << format_complex(qv.target.value, real) << ','
            << (qv.pass_at[j] ? "true" : "false") << '\n';
      }
}

/// KS checks of Re F and Im F at the last k against the marginals of the limit law.
inline json ks_json(const std::vector<std::complex<double>>& values, const Verdict& v, const CriterionSpec& spec) {
  json out = json::array();
  for (int part = 0; part < 2; ++part) {
    std::vector<double> x(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) x[i] = part == 0 ? values[i].real() : values[i].imag();
    json e;
    e["part"] = part == 0 ? "re" : "im";
    try {
      std::function<double(double)> cdf;
      if (is_chi2(v.resolved)) {
        const auto dof = spec.chi2_dof.value_or(
            std::array<double, 2>{(1 + v.a) * v.sigma2 / 4, (1 - v.a) * v.sigma2 / 4});
        e["target"] = "centered chi-square";
        e["dof"] = dof[part];
        cdf = centered_chi2_cdf_fn(dof[part]);
      } else {
        const double var = v.sigma2 * (part == 0 ? 1 + v.a : 1 - v.a) / 2;
        e["target"] = "normal";
        e["variance"] = var;
        cdf = normal_cdf_fn(0, var);
      }
      const auto r = ks_distance(std::move(x), cdf);
      e["distance"] = r.distance;
      e["p_value"] = r.p_value;
      e["maximal_mismatch"] = r.maximal_mismatch;
      e["pass"] = r.p_value >= 0.01;
    } catch (const std::exception& ex) {
      e["error"] = ex.what();
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

/// Runs an experiment. `workers` overrides the config when nonzero.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned workers = 0) {
  using detail::json;
  const unsigned w = workers ? workers : cfg.workers;
  std::optional<std::uint64_t> seed = cfg.seed;
  if (!seed && !cfg.exact) {
    if (const char* env = std::getenv("CCHAOS_SEED")) {
      try {
        seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ConfigError("CCHAOS_SEED is not an integer");
      }
    } else {
      throw ConfigError("monte-carlo experiments need a seed (config \"seed\" or CCHAOS_SEED)");
    }
  }
  // validate every component on its first element before any heavy work
  std::vector<unsigned> degrees;
  std::vector<std::optional<bool>> diagonal;
  for (const auto& comp : cfg.components) {
    const auto F = build_variable(comp.kernel, cfg.k.front(), cfg.base);
    F.validate();
    unsigned l = 0;
    for (const auto& p : F.parts) l = std::max(l, p.m() + p.n());
    if (!F.single_bidegree() && comp.criterion.tag != Case::multichaos && comp.criterion.tag != Case::multichaos_chi2)
      throw ConfigError("criterion: kernels with several bidegrees need a multichaos case");
    std::optional<bool> diag;
    if (F.single_bidegree()) diag = F.parts[0].m() == F.parts[0].n();
    try {
      validate_criterion(comp.criterion, l, diag);
    } catch (const CriterionError& e) {
      throw ConfigError(std::string("criterion: ") + e.what());
    }
    if (cfg.exact && 4 * l > kWickDegreeBudget)
      throw ConfigError("exact mode needs 4(m+n) <= " + std::to_string(kWickDegreeBudget));
    degrees.push_back(l);
    diagonal.push_back(diag);
  }
  if (cfg.multivariate) {
    try {
      validate_degrees(degrees);
    } catch (const CriterionError& e) {
      throw ConfigError(std::string("criterion: ") + e.what());
    }
  }

  const std::size_t d = cfg.components.size();
  std::vector<std::vector<MomentReport>> reports(d);
  std::vector<std::vector<CrossMoment>> cross;
  std::vector<std::complex<double>> last_values;
  json contractions = json::array();
  for (std::size_t j = 0; j < cfg.k.size(); ++j) {
    const std::size_t k = cfg.k[j];
    std::vector<ChaosVariable> vars;
    for (const auto& comp : cfg.components) vars.push_back(build_variable(comp.kernel, k, cfg.base));
    const bool last = j + 1 == cfg.k.size();
    if (cfg.multivariate) {
      auto r = estimate_joint(vars, cfg.N, *seed, w);
      for (std::size_t c = 0; c < d; ++c) reports[c].push_back(r.components[c]);
      cross.push_back(r.cross);
    } else if (cfg.exact) {
      reports[0].push_back(exact_report(exact_moments(vars[0])));
    } else {
      reports[0].push_back(estimate(vars[0], cfg.N, *seed, w, cfg.ks && last ? &last_values : nullptr));
    }
    if (cfg.contractions)
      for (std::size_t c = 0; c < d; ++c) {
        json e{{"component", c + 1}, {"k", k}};
        try {
          const auto [u, v] = contraction_norms(vars[c]);
          e["max_contraction_u"] = u;
          e["max_contraction_v"] = v;
        } catch (const ShapeError& ex) {
          e["error"] = ex.what();
        }
        contractions.push_back(e);
      }
  }

  std::ostringstream csv;
  csv << "k,quantity,estimate,stderr,target,pass\n";
  json out;
  out["mode"] = cfg.exact ? "exact" : "monte-carlo";
  if (!cfg.exact) {
    out["N"] = cfg.N;
    out["seed"] = *seed;
  }
  out["k"] = cfg.k;
  bool pass = true;
  json comps = json::array();
  std::vector<Verdict> verdicts;
  for (std::size_t c = 0; c < d; ++c) {
    Verdict v;
    try {
      v = verdict(cfg.k, reports[c], cfg.components[c].criterion, degrees[c], diagonal[c]);
    } catch (const CriterionError& e) {
      throw ConfigError(std::string("criterion: ") + e.what());
    }
    detail::csv_rows(csv, cfg.multivariate ? "F" + std::to_string(c + 1) + "." : "", cfg.k, v);
    json vj = detail::verdict_json(v);
    if (!cfg.multivariate && cfg.ks && !cfg.exact) vj["ks"] = detail::ks_json(last_values, v, cfg.components[c].criterion);
    pass = pass && v.pass;
    comps.push_back(vj);
    verdicts.push_back(std::move(v));
  }
  if (cfg.multivariate) {
    out["components"] = comps;
    json cj = json::array();
    if (!cross.empty())
      for (std::size_t p = 0; p < cross[0].size(); ++p) {
        const auto& first = cross[0][p];
        for (int which = 0; which < 2; ++which) {
          const std::string id = "E[" + std::string(which == 0 ? "" : "|") + "F" + std::to_string(first.j + 1) +
                                 (which == 0 ? "" : "|") + "^2*F" + std::to_string(first.i + 1) + "]";
          json traj = json::array();
          bool ok = true;
          for (std::size_t j = 0; j < cfg.k.size(); ++j) {
            const auto& e = which == 0 ? cross[j][p].sq : cross[j][p].abs2;
            const bool at = std::abs(e.value) <= verdict_tolerance(e.stderr_, 0.0);
            if (j + 1 == cfg.k.size()) ok = at;
            csv << cfg.k[j] << ',' << id << ',' << format_complex(e.value, false) << ',' << format_number(e.stderr_)
                << ",0," << (at ? "true" : "false") << '\n';
            traj.push_back({{"k", cfg.k[j]}, {"estimate", detail::complex_json(e.value)}, {"stderr", e.stderr_}, {"pass", at}});
          }
          // the cross condition matters only for chi-square components
          const bool relevant = is_chi2(verdicts[first.i].resolved) || is_chi2(verdicts[first.j].resolved);
          if (relevant) pass = pass && ok;
          cj.push_back({{"id", id}, {"role", relevant ? "criterion" : "info"}, {"target", 0}, {"trajectory", traj}, {"pass", ok}});
        }
      }
    out["cross_moments"] = cj;
  } else {
    out["verdict"] = comps[0];
  }
  if (cfg.contractions) out["contractions"] = contractions;
  out["pass"] = pass;
  return {csv.str(), out.dump(2) + "\n", pass};
}

/// Writes moments.csv and verdict.json into `dir` (created if needed).
inline void write_outputs(const ExperimentOutput& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "moments.csv", std::ios::binary) << r.csv;
  std::ofstream(dir / "verdict.json", std::ios::binary) << r.json;
}

}  // namespace cchaos
