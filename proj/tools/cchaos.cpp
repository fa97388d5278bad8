// cchaos: identity suites, exact Gaussian moments, and fourth-moment experiments.
//
// Exit codes: 0 success, 1 execution failure, 2 identity failure,
// 64 bad arguments or budget violation, 65 malformed input, 66 missing input file.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cchaos/experiment.hpp"
#include "cchaos/expr.hpp"
#include "cchaos/identities.hpp"

namespace fs = std::filesystem;
using namespace cchaos;

namespace {

enum Exit : int { ok = 0, failure = 1, identity_failure = 2, usage = 64, data_error = 65, no_input = 66 };

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_conversion_tables(const fs::path& file, unsigned max_degree) {
  std::ofstream out(file, std::ios::binary);
  out << "degree,direction,row,col,re,im\n";
  for (unsigned n = 0; n <= max_degree; ++n) {
    const auto t = h2j_table(n);
    for (const auto* tab : {&t.complex_to_real, &t.real_to_complex})
      for (unsigned r = 0; r <= n; ++r)
        for (unsigned c = 0; c <= n; ++c)
          out << n << ',' << (tab->direction == Direction::complex_to_real ? "complex_to_real" : "real_to_complex")
              << ',' << r << ',' << c << ',' << tab->at(r, c).re.get_str() << ',' << tab->at(r, c).im.get_str()
              << '\n';
  }
}

int cmd_identities(unsigned max_degree, const fs::path& out, const std::string& format,
                   const std::vector<unsigned>& tamper) {
  JProvider J = standard_j();
  if (!tamper.empty()) {
    if (tamper.size() != 2) {
      std::cerr << "--tamper-j takes m,n\n";
      return usage;
    }
    J = tampered_j(tamper[0], tamper[1]);
  }
  const auto rep = run_identities(max_degree, J);
  fs::create_directories(out);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["max_degree"] = max_degree;
    j["pass"] = rep.all_pass();
    auto& rs = j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : rep.results)
      rs.push_back({{"suite", r.suite}, {"degree", r.degree}, {"status", r.pass ? "pass" : "fail"}, {"detail", r.detail}});
    std::ofstream(out / "identities.json", std::ios::binary) << j.dump(2) << '\n';
  } else {
    std::ofstream f(out / "identities.csv", std::ios::binary);
    f << "suite,degree,status,detail\n";
    for (const auto& r : rep.results)
      f << r.suite << ',' << r.degree << ',' << (r.pass ? "pass" : "fail") << ',' << csv_field(r.detail) << '\n';
  }
  write_conversion_tables(out / "conversion_tables.csv", max_degree);
  for (const auto& suite : rep.suites()) {
    bool pass = true;
    for (const auto& r : rep.results)
      if (r.suite == suite && !r.pass) {
        pass = false;
        std::cerr << "FAIL " << suite << " degree " << r.degree << ": " << r.detail << '\n';
      }
    std::cout << (pass ? "pass " : "FAIL ") << suite << '\n';
  }
  return rep.all_pass() ? ok : identity_failure;
}

int cmd_oracle(const fs::path& file, const std::string& format) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << "cannot open " << file.string() << '\n';
    return no_input;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const auto v = expr::evaluate(ss.str(), file.parent_path().empty() ? fs::path(".") : file.parent_path());
    if (format == "json")
      std::cout << nlohmann::ordered_json{{"re", v.re.str()}, {"im", v.im.str()}}.dump() << '\n';
    else
      std::cout << v << '\n';
    return ok;
  } catch (const ParseError& e) {
    std::cerr << file.string() << ": " << e.what() << '\n';
    return data_error;
  } catch (const BudgetExceeded& e) {
    std::cerr << file.string() << ": " << e.what() << '\n';
    return usage;
  } catch (const MissingInput& e) {
    std::cerr << e.what() << '\n';
    return no_input;
  }
}

int cmd_experiment(const fs::path& config, fs::path out, unsigned workers) {
  try {
    const auto cfg = load_config(config);
    if (out.empty()) out = cfg.output;
    if (out.empty()) {
      std::cerr << "no output directory (--out or config \"output\")\n";
      return usage;
    }
    const auto r = run_experiment(cfg, workers);
    write_outputs(r, out);
    std::cout << "verdict: " << (r.pass ? "pass" : "fail") << '\n'
              << "wrote " << (out / "moments.csv").string() << " and " << (out / "verdict.json").string() << '\n';
    return ok;
  } catch (const ConfigError& e) {
    std::cerr << config.string() << ": " << e.what() << '\n';
    return data_error;
  } catch (const MissingInput& e) {
    std::cerr << e.what() << '\n';
    return no_input;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex Wiener chaos: identity suites, exact Gaussian moments, fourth-moment experiments"};
  app.require_subcommand(1);

  unsigned max_degree = 4;
  fs::path id_out, oracle_file, config, exp_out;
  std::string id_format = "csv", oracle_format = "text";
  std::vector<unsigned> tamper;
  unsigned workers = 0;

  auto* ids = app.add_subcommand("identities", "Run the exact Hermite / conversion identity suites");
  ids->add_option("--max-degree", max_degree, "Highest total degree checked")->required()->check(CLI::Range(0u, kIdentityMaxDegree));
  ids->add_option("--out", id_out, "Output directory")->required();
  ids->add_option("--format", id_format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  ids->add_option("--tamper-j", tamper, "Corrupt J_{m,n} to exercise the failure path")->delimiter(',')->expected(2);

  auto* orc = app.add_subcommand("oracle", "Print the exact value of an expectation expression");
  orc->add_option("file", oracle_file, "Expression file")->required();
  orc->add_option("--format", oracle_format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* exp = app.add_subcommand("experiment", "Run a fourth-moment experiment from a JSON config");
  exp->add_option("config", config, "Config file")->required();
  exp->add_option("--out", exp_out, "Output directory (defaults to the config's \"output\")");
  exp->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*ids) return cmd_identities(max_degree, id_out, id_format, tamper);
    if (*orc) return cmd_oracle(oracle_file, oracle_format);
    return cmd_experiment(config, exp_out, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}
