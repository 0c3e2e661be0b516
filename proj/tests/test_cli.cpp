#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(ADMMQ_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(ADMMQ_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("admmq_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(CliGenerate, WritesSymmetricInstance) {
  TempDir tmp;
  const auto r = cli("generate --d 2 --v 8 --sigma-q-sq 30 --seed 1 --out " + (tmp / "a.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(slurp(tmp / "a.json"));
  ASSERT_EQ(j["Q"].size(), 2u);
  EXPECT_EQ(j["Q"][0][1], j["Q"][1][0]);
  EXPECT_EQ(j["b"].size(), 2u);
}

TEST(CliGenerate, SameFlagsGiveIdenticalFiles) {
  TempDir tmp;
  ASSERT_EQ(cli("generate --d 5 --seed 9 --out " + (tmp / "a.json")).code, 0);
  ASSERT_EQ(cli("generate --d 5 --seed 9 --out " + (tmp / "b.json")).code, 0);
  EXPECT_EQ(slurp(tmp / "a.json"), slurp(tmp / "b.json"));
  ASSERT_EQ(cli("generate --d 5 --seed 10 --out " + (tmp / "c.json")).code, 0);
  EXPECT_NE(slurp(tmp / "a.json"), slurp(tmp / "c.json"));
}

TEST(CliGenerate, InvalidDimensionExitsTwo) {
  TempDir tmp;
  EXPECT_EQ(cli("generate --d 0 --out " + (tmp / "a.json")).code, 2);
  EXPECT_FALSE(fs::exists(tmp / "a.json"));
  EXPECT_EQ(cli("generate --d 2 --out /nonexistent/dir/a.json").code, 2);
}

TEST(CliSolve, OneDimensionalDemo) {
  const auto r = cli("solve --instance " + data("one_dim.json") + " --algorithm admm-q --rho 2 --x0 0");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["final_objective"].get<double>(), 0.08, 1e-12);
  EXPECT_EQ(j["stationary"], true);
  EXPECT_EQ(j["y"][0], 0.0);
}

TEST(CliSolve, FullMaskAdmmRMatchesAdmmQ) {
  TempDir tmp;
  ASSERT_EQ(cli("generate --d 6 --seed 4 --out " + (tmp / "i.json")).code, 0);
  const std::string common = " --instance " + (tmp / "i.json") + " --rho 50000 --iters 300 --seed 11";
  const auto q = cli("solve --algorithm admm-q" + common);
  const auto r = cli("solve --algorithm admm-r --p 1" + common);
  ASSERT_EQ(q.code, 0);
  ASSERT_EQ(r.code, 0);
  auto jq = nlohmann::json::parse(q.out);
  auto jr = nlohmann::json::parse(r.out);
  jq.erase("algorithm");
  jr.erase("algorithm");
  EXPECT_EQ(jq, jr);
}

TEST(CliSolve, TraceFile) {
  TempDir tmp;
  const auto r = cli("solve --instance " + data("one_dim.json") + " --algorithm admm-q --rho 2 --iters 5 --x0 1 --trace " +
                     (tmp / "t.csv"));
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(slurp(tmp / "t.csv"));
  std::string header, line;
  std::getline(lines, header);
  EXPECT_NE(header.find("lagrangian"), std::string::npos);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(CliSolve, DivergenceExitsThree) {
  TempDir tmp;
  ASSERT_EQ(cli("generate --d 4 --seed 7 --out " + (tmp / "i.json")).code, 0);
  EXPECT_EQ(cli("solve --instance " + (tmp / "i.json") + " --algorithm pgd --rho 1e-9 --iters 200").code, 3);
  // rho below the weak-convexity modulus leaves the x-update without a minimizer.
  EXPECT_EQ(cli("solve --instance " + data("indefinite.json") + " --algorithm admm-q --rho 1 --force").code, 3);
}

TEST(CliSolve, ConditionViolationNeedsForce) {
  const std::string base = "solve --instance " + data("one_dim.json") + " --algorithm admm-q --rho 1 --x0 0";
  const auto r = cli(base);
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(nlohmann::json::parse(r.out)["condition"], false);
  EXPECT_EQ(cli(base + " --force").code, 0);
}

TEST(CliSolve, FlagsMustMatchAlgorithm) {
  const std::string base = "solve --instance " + data("one_dim.json") + " --rho 2";
  EXPECT_EQ(cli(base + " --algorithm admm-q --beta 1").code, 2);
  EXPECT_EQ(cli(base + " --algorithm admm-q --p 0.5").code, 2);
  EXPECT_EQ(cli(base + " --algorithm admm-s --gamma 0.1").code, 2);
  EXPECT_EQ(cli(base + " --algorithm nope").code, 2);
  EXPECT_EQ(cli(base + " --algorithm admm-r --p 1.5").code, 2);
  EXPECT_EQ(cli("solve --instance " + data("missing.json") + " --rho 2").code, 2);
}

TEST(CliSolve, CsvFormat) {
  const auto r = cli("solve --instance " + data("one_dim.json") + " --algorithm admm-q --rho 2 --x0 0 --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_NE(header.find("final_objective"), std::string::npos);
  EXPECT_NE(row.find("0.08"), std::string::npos);
}

TEST(CliSweep, RowCountsDeterminismAndQuantiles) {
  TempDir tmp;
  fs::create_directories(tmp.path() / "a");
  fs::create_directories(tmp.path() / "b");
  {
    std::ofstream p(tmp / "protocol.json");
    p << R"({"n_inits": 2, "iters_admm": 10, "iters_pgd": 10, "window": 5, "rho_grid": [1.0, 100.0]})";
  }
  const std::string args = " --instances 1 --d 3 --protocol " + (tmp / "protocol.json") +
                           " --algorithms admm-q,pgd --seed 5 --threads 1";
  ASSERT_EQ(cli("sweep" + args + " --out " + (tmp / "a")).code, 0);
  ASSERT_EQ(cli("sweep" + args + " --out " + (tmp / "b")).code, 0);
  const std::string csv = slurp(tmp.path() / "a" / "sweep.csv");
  EXPECT_EQ(csv, slurp(tmp.path() / "b" / "sweep.csv"));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  // 2 algorithms x 2 grid points x 2 inits.
  EXPECT_EQ(rows, 8);

  const auto s = nlohmann::json::parse(slurp(tmp.path() / "a" / "summary.json"));
  for (const auto& inst : s["instances"]) {
    for (const auto& [name, alg] : inst["algorithms"].items()) {
      for (const auto& g : alg["grid"]) {
        if (g["median"].is_null()) continue;
        EXPECT_LE(g["q25"].get<double>(), g["median"].get<double>()) << name;
        EXPECT_LE(g["median"].get<double>(), g["q75"].get<double>()) << name;
      }
    }
  }
  EXPECT_TRUE(fs::exists(tmp.path() / "a" / "hist_pgd_minus_admm-q.csv"));
}

TEST(CliSweep, InstanceDirectoryAndErrors) {
  TempDir tmp;
  fs::create_directories(tmp.path() / "inst");
  fs::create_directories(tmp.path() / "out");
  ASSERT_EQ(cli("generate --d 2 --seed 1 --out " + (tmp.path() / "inst" / "a.json").string()).code, 0);
  {
    std::ofstream p(tmp / "protocol.json");
    p << R"({"n_inits": 1, "iters_admm": 5, "iters_pgd": 5, "window": 2, "rho_grid": [10.0]})";
  }
  const std::string base = "sweep --protocol " + (tmp / "protocol.json") + " --algorithms admm-q --out " + (tmp / "out");
  EXPECT_EQ(cli(base + " --instances " + (tmp.path() / "inst").string()).code, 0);
  {
    std::ofstream bad(tmp.path() / "inst" / "b.json");
    bad << "{not json";
  }
  EXPECT_NE(cli(base + " --instances " + (tmp.path() / "inst").string()).code, 0);
  EXPECT_EQ(cli("sweep --instances 1 --out " + (tmp / "missing")).code, 2);
}

TEST(CliAnalysis, CheckStationaryOscillating) {
  const auto r = cli("check-stationary --instance " + data("oscillating.json") + " --point 0 --rho 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["is_stationary"], false);
  const auto at_one = cli("check-stationary --instance " + data("oscillating.json") + " --point 0 --rho 1");
  EXPECT_EQ(nlohmann::json::parse(at_one.out)["is_stationary"], true);
  EXPECT_EQ(cli("check-stationary --instance " + data("oscillating.json") + " --point 0.5 --rho 1").code, 2);
}

TEST(CliAnalysis, BruteForce49Points) {
  const auto r = cli("bruteforce --instance " + data("grid49.json") + " --bounds -3,3");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["argmin"], nlohmann::json::array({1.0, -1.0}));
  EXPECT_NEAR(j["value"].get<double>(), -1.8, 1e-12);
  EXPECT_EQ(j["evaluated"], 49);
  EXPECT_EQ(cli("bruteforce --instance " + data("oscillating.json")).code, 2);
}

TEST(CliAnalysis, VerifyConditions) {
  const auto r = cli("verify-conditions --Lf 1 --mu 0 --rho 1.5");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["decrease"], true);
  EXPECT_EQ(j["pgd"], true);
  const auto g = nlohmann::json::parse(cli("verify-conditions --Lf 1 --mu 1 --rho 6 --gamma 0.1").out);
  EXPECT_EQ(g["iadmm"], true);
  EXPECT_NEAR(g["iadmm_value"].get<double>(), -1.00333333333, 1e-10);
  EXPECT_EQ(nlohmann::json::parse(cli("verify-conditions --Lf 1 --mu 0 --rho 1.4").out)["decrease"], false);
}

TEST(CliGeneral, HelpAndBadFlags) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("solve --help").code, 0);
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("verify-conditions --Lf 1 --mu 0 --rho 1.5 --bogus").code, 2);
  EXPECT_EQ(cli("verify-conditions --Lf abc --mu 0 --rho 1.5").code, 2);
}
