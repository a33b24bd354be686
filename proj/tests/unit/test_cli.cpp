#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "groundline/io.hpp"

namespace fs = std::filesystem;
using namespace groundline;

namespace {

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(GROUNDLINE_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("groundline_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, HelpExitsZeroEverywhere) {
  EXPECT_EQ(run("--help").code, 0);
  for (const char* sub : {"simulate", "estimate", "evaluate", "stats", "ipm", "vanishing", "groundtruth"}) {
    EXPECT_EQ(run(std::string(sub) + " --help").code, 0) << sub;
  }
}

TEST_F(Cli, UnknownFlagExitsTwo) {
  EXPECT_EQ(run("simulate --bogus").code, 2);
  EXPECT_EQ(run("estimate --input x --estimator kalman").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, SimulateWritesThreeFilesOfEqualLength) {
  spit(p("cfg.json"), R"({"frames": 120})");
  const CliRun r = run("simulate --config " + p("cfg.json") + " --out " + p("sim"));
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string odo = slurp(p("sim/odometry.csv"));
  const std::string gtp = slurp(p("sim/gt_poses.txt"));
  const std::string gtn = slurp(p("sim/gt_normals.csv"));
  EXPECT_EQ(count_lines(odo), 121u);  // header
  EXPECT_EQ(count_lines(gtp), 120u);
  EXPECT_EQ(count_lines(gtn), 121u);
}

TEST_F(Cli, SimulateIsDeterministicPerSeed) {
  ASSERT_EQ(run("simulate --seed 5 --out " + p("a")).code, 0);
  ASSERT_EQ(run("simulate --seed 5 --out " + p("b")).code, 0);
  ASSERT_EQ(run("simulate --seed 6 --out " + p("c")).code, 0);
  EXPECT_EQ(slurp(p("a/odometry.csv")), slurp(p("b/odometry.csv")));
  EXPECT_NE(slurp(p("a/odometry.csv")), slurp(p("c/odometry.csv")));
}

TEST_F(Cli, ZeroFramesNamesField) {
  spit(p("cfg.json"), R"({"frames": 0})");
  const CliRun r = run("simulate --config " + p("cfg.json") + " --out " + p("sim"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("frames"), std::string::npos) << r.output;
}

TEST_F(Cli, FlatInputGivesStaticNormalAfterBurnIn) {
  spit(p("cfg.json"), R"({"frames": 100, "pitch_amplitude": 0, "roll_amplitude": 0, "odometry_noise_std": 0})");
  ASSERT_EQ(run("simulate --config " + p("cfg.json") + " --out " + p("sim")).code, 0);
  const CliRun r = run("estimate --input " + p("sim/odometry.csv") + " --format relcsv --out " + p("n.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("iekf step latency: mean"), std::string::npos);
  const auto rows = io::read_normals(p("n.csv"));
  ASSERT_EQ(rows.size(), 100u);
  for (std::size_t i = 20; i < rows.size(); ++i) EXPECT_EQ(rows[i].normal.vec(), Vec3(0, 1, 0));
}

TEST_F(Cli, AllEstimatorsFeedEvaluate) {
  spit(p("cfg.json"), R"({"frames": 600, "seed": 11})");
  ASSERT_EQ(run("simulate --config " + p("cfg.json") + " --out " + p("sim")).code, 0);
  double iekf = 0.0, constant = 0.0;
  std::string previous;
  for (const std::string est : {"iekf", "constant", "relative", "absolute"}) {
    const std::string out = p(est + ".csv");
    ASSERT_EQ(run("estimate --input " + p("sim/odometry.csv") + " --format relcsv --estimator " + est + " --out " + out).code, 0);
    const std::string content = slurp(out);
    EXPECT_NE(content, previous) << est;
    previous = content;
    const CliRun e = run("evaluate --estimate " + out + " --gt " + p("sim/gt_normals.csv") + " --out " + p(est + ".json"));
    ASSERT_EQ(e.code, 0) << e.output;
    const double mean = std::stod(e.output.substr(e.output.find("mean_error_deg: ") + 16));
    if (est == "iekf") iekf = mean;
    if (est == "constant") constant = mean;
    EXPECT_TRUE(fs::exists(p(est + ".json")));
  }
  EXPECT_LT(iekf, constant);
}

TEST_F(Cli, EvaluateIdenticalFilesIsZero) {
  spit(p("a.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n1,0.01,1,0,0\n");
  const CliRun r = run("evaluate --burn-in 0 --estimate " + p("a.csv") + " --gt " + p("a.csv"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("mean_error_deg: 0.000000"), std::string::npos);
}

TEST_F(Cli, EvaluateLengthMismatchExitsOne) {
  spit(p("a.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n");
  spit(p("b.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n1,0,1,0,0\n");
  EXPECT_EQ(run("evaluate --estimate " + p("a.csv") + " --gt " + p("b.csv")).code, 1);
}

TEST_F(Cli, EstimateParseFailureExitsOne) {
  spit(p("bad.txt"), "1 0 0 0 0 1 0 0 0 0 1\n");
  const CliRun r = run("estimate --input " + p("bad.txt") + " --out " + p("n.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 1"), std::string::npos) << r.output;
}

TEST_F(Cli, VanishingLineRow) {
  spit(p("n.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n");
  ASSERT_EQ(run("vanishing --normals " + p("n.csv") + " --intrinsics 700,700,600,185,1242,375 --out " + p("v.csv")).code, 0);
  const std::string v = slurp(p("v.csv"));
  EXPECT_NE(v.find("0,0.000000000,1.000000000,-185.000000000,0.000000,185.000000,1241.000000,185.000000"),
            std::string::npos)
      << v;
}

TEST_F(Cli, IpmConstantRowsForStaticNormals) {
  spit(p("n.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n1,0,1,0,0\n2,0,1,0,0\n");
  ASSERT_EQ(run("ipm --normals " + p("n.csv") + " --intrinsics 700,700,600,185,1242,375 --out " + p("h.csv")).code, 0);
  std::istringstream in(slurp(p("h.csv")));
  std::string header, a, b, c;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  std::getline(in, c);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
}

TEST_F(Cli, IpmWithoutIntrinsicsExitsOne) {
  spit(p("n.csv"), "frame,nx,ny,nz,pitch_deg\n0,0,1,0,0\n");
  EXPECT_EQ(run("ipm --normals " + p("n.csv") + " --out " + p("h.csv")).code, 1);
}

TEST_F(Cli, StatsReportsPitchDynamics) {
  spit(p("cfg.json"), R"({"frames": 400, "odometry_noise_std": 0})");
  ASSERT_EQ(run("simulate --config " + p("cfg.json") + " --out " + p("sim")).code, 0);
  const CliRun r = run("stats --gt " + p("sim/gt_normals.csv") + " --static 0,1,0 --out " + p("s.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(p("s.json")));
  // Mean |sin| sampled at 20 points per period is 0.6314 for a 1 degree amplitude.
  EXPECT_NEAR(j["pitch_mean_deg"].get<double>(), 0.6314, 1e-3);
  EXPECT_NEAR(j["roll_mean_deg"].get<double>(), 0.0, 1e-9);
}
