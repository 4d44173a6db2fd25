#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "psd/serialize.hpp"
#include "psd/simulation.hpp"

using namespace psd;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("psd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(PSD_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                            " 2>" + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

int count_lines(const std::string& text) {
  int n = 0;
  for (char ch : text) n += ch == '\n';
  return n;
}

}  // namespace

TEST_F(Cli, ForwardWritesCurve) {
  write("mp.json", R"({"kind":"point_mass","at":1})");
  ASSERT_EQ(run("forward --model " + path("mp.json") + " --c 0.25 --grid 0:3:400 --out " + path("curve.csv")), 0);
  const auto csv = read("curve.csv");
  EXPECT_EQ(csv.rfind("x,f\n", 0), 0u);
  EXPECT_EQ(count_lines(csv), 401);
}

TEST_F(Cli, SupportReport) {
  write("fig1.json", R"({"kind":"discrete","atoms":[2,7,10],"weights":[0.3,0.4,0.3]})");
  ASSERT_EQ(run("support --model " + path("fig1.json") + " --c 0.1"), 0);
  const auto j = json::parse(read("stdout.txt"));
  EXPECT_EQ(j["support"].size(), 2u);
  write("mp.json", R"({"kind":"point_mass","at":1})");
  ASSERT_EQ(run("support --model " + path("mp.json") + " --c 4 --out " + path("s.json")), 0);
  EXPECT_TRUE(read_json_file(path("s.json"))["mass_at_zero"].get<bool>());
}

TEST_F(Cli, EstimateDiscrete) {
  const auto spec = sample_spectrum(population_from_model(DiscretePSD({1, 2}, {0.5, 0.5}), 100), 500, 3);
  std::ostringstream eigs;
  eigs << "eigenvalue\n";
  for (double l : spec.eigenvalues()) eigs << l << "\n";
  write("eigs.csv", eigs.str());
  ASSERT_EQ(run("estimate --eigs " + path("eigs.csv") + " --p 100 --n 500 --family discrete --order 2 --l 20 --out " +
                path("fit.json")),
            0);
  const auto j = read_json_file(path("fit.json"));
  EXPECT_EQ(j["model"]["atoms"].size(), 2u);
  EXPECT_EQ(j["unet"]["points"].size(), 60u);
  // same call twice gives the same bytes
  const auto first = read("fit.json");
  ASSERT_EQ(run("estimate --eigs " + path("eigs.csv") + " --p 100 --n 500 --family discrete --order 2 --out " +
                path("fit.json")),
            0);
  EXPECT_EQ(read("fit.json"), first);
}

TEST_F(Cli, InputErrorsExitOne) {
  write("eigs.csv", "1.0\n2.0\n");
  EXPECT_EQ(run("estimate --eigs " + path("missing.csv") + " --p 2 --n 4 --family discrete"), 1);
  EXPECT_EQ(run("estimate --eigs " + path("eigs.csv") + " --p 2 --n 4 --family gaussian"), 1);
  EXPECT_EQ(run("estimate --eigs " + path("eigs.csv") + " --p 3 --n 4 --family discrete"), 1);
  write("bad.json", R"({"kind":"discrete","atoms":[1,2],"weights":[0.9,0.9]})");
  EXPECT_EQ(run("forward --model " + path("bad.json") + " --c 0.5"), 1);
  write("mp.json", R"({"kind":"point_mass","at":1})");
  EXPECT_EQ(run("forward --model " + path("mp.json") + " --c -1"), 1);
  EXPECT_EQ(run("forward --model " + path("mp.json") + " --c 0.5 --grid 1:2"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, NumericalFailureExitsTwo) {
  // 30 Laguerre coefficients on a 40-point net: the design is numerically rank deficient.
  std::ostringstream eigs;
  for (int i = 1; i <= 50; ++i) eigs << 0.02 * i << "\n";
  write("eigs.csv", eigs.str());
  EXPECT_EQ(run("estimate --eigs " + path("eigs.csv") + " --p 50 --n 100 --family laguerre --order 30 --l 40"), 2);
}

TEST_F(Cli, SimulateDeterministic) {
  write("cfg.json", R"({"name":"case1","model":{"kind":"discrete","atoms":[1,2],"weights":[0.5,0.5]},
    "dims":[[40,200]],"replications":3,"seed":11,"family":"discrete","order":2})");
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --out " + path("r1.json")), 0);
  ASSERT_EQ(run("simulate --config " + path("cfg.json") + " --out " + path("r2.json") + " --threads 2"), 0);
  EXPECT_EQ(read("r1.json"), read("r2.json"));
  EXPECT_EQ(read("r1.csv"), read("r2.csv"));
  EXPECT_EQ(read("r1.csv").rfind("case,p,n,mean_W,sd_W,failures\n", 0), 0u);
  EXPECT_EQ(read_json_file(path("r1.json"))["rows"][0]["records"].size(), 3u);
}

TEST_F(Cli, AnalyzeEmitsFourFiles) {
  const auto r = synthetic_returns(InverseCubicPSD(0.5), 60, 300, 5);
  std::ostringstream csv;
  for (std::size_t j = 0; j < r.labels.size(); ++j) csv << (j ? "," : "") << r.labels[j];
  csv << ",GAP\n";
  csv.precision(17);
  for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.values.cols(); ++j) csv << (j ? "," : "") << r.values(i, j);
    csv << "," << (i == 7 ? "" : "0.1") << "\n";
  }
  write("returns.csv", csv.str());
  ASSERT_EQ(run("analyze --returns " + path("returns.csv") + " --spikes 2 --bandwidth 0.05 --out " + path("out")), 0)
      << read("stderr.txt");
  for (const char* f : {"fit.json", "empirical.csv", "fitted_lsd.csv", "mp_baseline.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  const auto fit = read_json_file(path("out/fit.json"));
  EXPECT_EQ(fit["p"], 58);
  EXPECT_EQ(fit["dropped"].size(), 1u);
  EXPECT_GE(fit["alpha"].get<double>(), 0.0);
  EXPECT_LT(fit["alpha"].get<double>(), 1.0);
  EXPECT_EQ(count_lines(read("out/empirical.csv")), 401);
}
