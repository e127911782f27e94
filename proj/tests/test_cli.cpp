#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fuvalkit/bench.hpp"
#include "fuvalkit/cli.hpp"

namespace fs = std::filesystem;
using namespace fuvalkit;

namespace {

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fuvalkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "fuvalkit-test-cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, FitWritesTrace) {
  const fs::path out = scratch() / "runs";
  fs::remove_all(out);
  EXPECT_EQ(invoke({"fit", "--synthetic", "interp:n=100,d=10,seed=1", "--method", "fuval", "--scheme", "uifv", "--eta",
                    "0.5", "--epochs", "20", "--seed", "7", "--out", out.string()}),
            cli::kExitOk);
  const fs::path csv = out / "fuval_uifv_eta0.5_seed7.csv";
  ASSERT_TRUE(fs::exists(csv));
  EXPECT_TRUE(fs::exists(out / "fuval_uifv_eta0.5_seed7.meta"));
  const auto records = read_trace_csv(csv.string());
  EXPECT_EQ(records.size(), 21u);
  EXPECT_EQ(records.back().t, 2000u);
}

TEST(Cli, FitSpsWithSolvedReference) {
  const fs::path out = scratch() / "sps";
  EXPECT_EQ(invoke({"fit", "--synthetic", "logistic:n=50,d=4,seed=1", "--method", "sps-plus", "--solve-reference",
                    "--reference-cache", (scratch() / "cache").string(), "--epochs", "2", "--out", out.string()}),
            cli::kExitOk);
  EXPECT_TRUE(fs::exists(out / "sps-plus_none_eta1_seed0.csv"));
}

TEST(Cli, ReferenceFileFeedsFit) {
  const fs::path ref = scratch() / "ref.json";
  ASSERT_EQ(invoke({"reference", "--synthetic", "logistic:n=50,d=4,seed=1", "--out", ref.string()}), cli::kExitOk);
  EXPECT_EQ(invoke({"fit", "--synthetic", "logistic:n=50,d=4,seed=1", "--method", "sps", "--reference",
                    ref.string(), "--epochs", "1", "--out", (scratch() / "sps2").string()}),
            cli::kExitOk);
  EXPECT_EQ(invoke({"fit", "--synthetic", "logistic:n=50,d=4,seed=2", "--method", "sps", "--reference",
                    ref.string(), "--epochs", "1", "--out", (scratch() / "sps3").string()}),
            cli::kExitConfig);
}

TEST(Cli, ConfigErrors) {
  testing::internal::CaptureStderr();
  EXPECT_EQ(invoke({"fit", "--data", "/no/such/file.svm", "--out", scratch().string()}), cli::kExitConfig);
  EXPECT_NE(testing::internal::GetCapturedStderr().find("--data"), std::string::npos);

  EXPECT_EQ(invoke({"fit", "--synthetic", "interp:n=10,d=2", "--method", "sps", "--out", scratch().string()}),
            cli::kExitConfig);
  EXPECT_EQ(invoke({"fit", "--out", scratch().string()}), cli::kExitConfig);
  EXPECT_EQ(invoke({"fit", "--synthetic", "interp:n=10,d=2", "--data", "x.svm"}), cli::kExitConfig);
  EXPECT_EQ(invoke({"fit", "--synthetic", "interp:n=10,d=2", "--method", "adam"}), cli::kExitConfig);
  EXPECT_EQ(invoke({"fit", "--synthetic", "interp:n=10,d=2", "--gamma", "0"}), cli::kExitConfig);
  EXPECT_EQ(invoke({"grid", "--synthetic", "interp:n=10,d=2", "--eta-grid", "1,1"}), cli::kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}), cli::kExitConfig);
}

TEST(Cli, DivergenceExitCode) {
  EXPECT_EQ(invoke({"fit", "--synthetic", "noisy:n=30,d=4,seed=1", "--method", "gd", "--eta", "100", "--epochs",
                    "5000", "--out", (scratch() / "div").string()}),
            cli::kExitDiverged);
}

TEST(Cli, GridRowsAndDeterminism) {
  const fs::path a = scratch() / "grid_a.csv", b = scratch() / "grid_b.csv", c = scratch() / "grid_c.csv";
  const std::vector<std::string> common{"grid", "--synthetic", "logistic:n=200,d=5,seed=3", "--eta-grid",
                                        "logspace:1e-4,1e2,25", "--iters", "200", "--no-timing"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = common;
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
  };
  ASSERT_EQ(invoke(with({"--methods", "gd,fuval-full", "--schemes", "uifv", "--out", a.string()})), cli::kExitOk);
  EXPECT_EQ(read_sensitivity_csv(a.string()).rows.size(), 50u);

  ASSERT_EQ(invoke(with({"--methods", "gd,fuval-full", "--schemes", "naive,uifv,uigrad", "--out", b.string()})),
            cli::kExitOk);
  const auto table = read_sensitivity_csv(b.string());
  std::size_t gd = 0, fuval = 0;
  for (const auto& r : table.rows) (r.method == "gd" ? gd : fuval)++;
  EXPECT_EQ(gd, 25u);
  EXPECT_EQ(fuval, 75u);

  ASSERT_EQ(invoke(with({"--methods", "gd,fuval-full", "--schemes", "naive,uifv,uigrad", "--jobs", "2", "--out",
                         c.string()})),
            cli::kExitOk);
  EXPECT_EQ(slurp(b), slurp(c));
}

TEST(Cli, Verify) {
  testing::internal::CaptureStdout();
  EXPECT_EQ(invoke({"verify", "equivalence"}), cli::kExitOk);
  const std::string out = testing::internal::GetCapturedStdout();
  std::size_t passes = 0;
  for (std::size_t pos = out.find("PASS"); pos != std::string::npos; pos = out.find("PASS", pos + 1)) ++passes;
  EXPECT_EQ(passes, 3u);

  testing::internal::CaptureStderr();
  EXPECT_EQ(invoke({"verify", "nonsense"}), cli::kExitConfig);
  testing::internal::GetCapturedStderr();
}

TEST(Cli, HelpListsDefaults) {
  testing::internal::CaptureStdout();
  EXPECT_EQ(invoke({"grid", "--help"}), cli::kExitOk);
  const std::string help = testing::internal::GetCapturedStdout();
  EXPECT_NE(help.find("logspace:1e-4,1e2,25"), std::string::npos);
  EXPECT_NE(help.find("--jobs"), std::string::npos);
}

TEST(Cli, GenWritesLibsvm) {
  const fs::path f = scratch() / "gen.svm";
  ASSERT_EQ(invoke({"gen", "--synthetic", "logistic:n=30,d=4,seed=2", "--out", f.string()}), cli::kExitOk);
  EXPECT_EQ(invoke({"fit", "--data", f.string(), "--method", "gd", "--eta", "0.5", "--epochs", "10", "--out",
                    (scratch() / "gen_runs").string()}),
            cli::kExitOk);
}
