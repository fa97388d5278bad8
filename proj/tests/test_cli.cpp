#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = CCHAOS_CLI;
const fs::path kData = CCHAOS_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("cchaos_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Run cli(const std::string& args, const std::string& name) {
  const auto d = scratch(name + "_io");
  const std::string cmd = kCli + " " + args + " > " + (d / "stdout").string() + " 2> " + (d / "stderr").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(d / "stdout"), slurp(d / "stderr")};
}

std::string data(const std::string& f) { return (kData / f).string(); }

}  // namespace

TEST(CliIdentities, PassingRun) {
  const auto out = scratch("ids");
  const auto r = cli("identities --max-degree 4 --out " + out.string(), "ids");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto report = slurp(out / "identities.csv");
  for (const char* suite : {"complex-real-conversion", "monomial-expansion", "eigenrelation", "rotation-expansion",
                            "products-from-rotations", "rotation-in-complex-basis", "complex-from-rotations", "det-M"})
    EXPECT_NE(report.find(std::string(suite) + ",4,pass"), std::string::npos) << suite;
  EXPECT_EQ(report.find("fail"), std::string::npos);
  const auto tables = slurp(out / "conversion_tables.csv");
  EXPECT_EQ(tables.rfind("degree,direction,row,col,re,im\n", 0), 0u);
  EXPECT_NE(tables.find("4,real_to_complex,"), std::string::npos);
}

TEST(CliIdentities, JsonReport) {
  const auto out = scratch("ids_json");
  EXPECT_EQ(cli("identities --max-degree 2 --format json --out " + out.string(), "ids_json").code, 0);
  EXPECT_NE(slurp(out / "identities.json").find("\"suite\": \"det-M\""), std::string::npos);
}

TEST(CliIdentities, TamperedJFails) {
  const auto out = scratch("ids_tamper");
  const auto r = cli("identities --max-degree 4 --tamper-j 2,1 --out " + out.string(), "ids_tamper");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("J_{2,1}"), std::string::npos) << r.err;
  EXPECT_NE(slurp(out / "identities.csv").find(",3,fail,"), std::string::npos);
}

TEST(CliIdentities, BadArguments) {
  const auto out = scratch("ids_bad");
  EXPECT_EQ(cli("identities --max-degree 9 --out " + out.string(), "ids_bad").code, 64);
  EXPECT_EQ(cli("identities --out " + out.string(), "ids_bad").code, 64);
  EXPECT_EQ(cli("identities --max-degree two --out " + out.string(), "ids_bad").code, 64);
  EXPECT_EQ(cli("frobnicate", "ids_bad").code, 64);
  EXPECT_EQ(cli("", "ids_bad").code, 64);
}

TEST(CliOracle, Values) {
  auto r = cli("oracle " + data("abs4.expr"), "oracle");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "8\n");
  r = cli("oracle " + data("j11.expr"), "oracle");
  EXPECT_EQ(r.out, "0\n");
  r = cli("oracle " + data("kernel.expr"), "oracle");
  EXPECT_EQ(r.out, "2\n");
  r = cli("oracle --format json " + data("abs4.expr"), "oracle");
  EXPECT_EQ(r.out, "{\"re\":\"8\",\"im\":\"0\"}\n");
}

TEST(CliOracle, Errors) {
  EXPECT_EQ(cli("oracle " + data("malformed.expr"), "oracle_err").code, 65);
  EXPECT_EQ(cli("oracle " + data("budget.expr"), "oracle_err").code, 64);
  EXPECT_EQ(cli("oracle " + data("absent.expr"), "oracle_err").code, 66);
}

TEST(CliExperiment, OutputShapeAndWorkerDeterminism) {
  const auto a = scratch("exp_a"), b = scratch("exp_b");
  const auto ra = cli("experiment " + data("offdiag_block.json") + " --workers 1 --out " + a.string(), "exp_a");
  const auto rb = cli("experiment " + data("offdiag_block.json") + " --workers 3 --out " + b.string(), "exp_b");
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  const auto csv = slurp(a / "moments.csv");
  EXPECT_EQ(csv, slurp(b / "moments.csv"));
  EXPECT_EQ(slurp(a / "verdict.json"), slurp(b / "verdict.json"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,quantity,estimate,stderr,target,pass");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3 * 5);
  EXPECT_NE(slurp(a / "verdict.json").find("\"pass\""), std::string::npos);
}

TEST(CliExperiment, ExitCodes) {
  const auto out = scratch("exp_err");
  auto r = cli("experiment " + data("chi2_odd.json") + " --out " + out.string(), "exp_err");
  EXPECT_EQ(r.code, 65);
  EXPECT_NE(r.err.find("odd"), std::string::npos) << r.err;
  EXPECT_EQ(cli("experiment " + data("malformed.json") + " --out " + out.string(), "exp_err").code, 65);
  EXPECT_EQ(cli("experiment " + data("missing_kernel.json") + " --out " + out.string(), "exp_err").code, 66);
  EXPECT_EQ(cli("experiment " + data("absent.json") + " --out " + out.string(), "exp_err").code, 66);
  // a failing verdict still completes with exit 0
  EXPECT_EQ(cli("experiment " + data("offdiag_exact.json") + " --out " + out.string(), "exp_err").code, 0);
  EXPECT_NE(slurp(out / "verdict.json").find("\"pass\": false"), std::string::npos);
}
