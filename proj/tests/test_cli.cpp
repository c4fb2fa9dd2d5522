#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STLAWS_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("stlaws_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::string field(const std::string& out, const std::string& key) {
  const auto at = out.find(key + ": ");
  if (at == std::string::npos) return "";
  const auto start = at + key.size() + 2;
  return out.substr(start, out.find('\n', start) - start);
}

std::vector<std::string> lines_of(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

}  // namespace

TEST_F(CliTest, TraceSmallBound) {
  const auto r = run("trace 7,13 --pmax 10");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(field(r.out, "records"), "4");
}

TEST_F(CliTest, TraceCacheWarmRunIsNoOp) {
  const auto cache = path("c.bin");
  auto first = run("trace 7,13 --pmax 5000 --cache " + cache);
  ASSERT_EQ(first.code, 0) << first.out;
  const auto written = fs::last_write_time(cache);
  const auto size = fs::file_size(cache);
  auto second = run("trace 7,13 --pmax 5000 --cache " + cache);
  EXPECT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("cache up to date"), std::string::npos);
  EXPECT_EQ(fs::last_write_time(cache), written);
  EXPECT_EQ(field(first.out, "n_good"), field(second.out, "n_good"));
  auto extended = run("trace 7,13 --pmax 8000 --cache " + cache);
  EXPECT_EQ(extended.code, 0);
  EXPECT_GT(fs::file_size(cache), size);
  EXPECT_EQ(run("trace 7,17 --pmax 100 --cache " + cache).code, 2);
}

TEST_F(CliTest, CMCurveHasHalfZeroTraces) {
  const auto r = run("trace k3clausen:1 --pmax 10000");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(std::stod(field(r.out, "zero_trace_fraction")), 0.5, 0.02);
}

TEST_F(CliTest, K3VerifyAndReports) {
  const auto r = run("k3 --lambda 2 --pmax 2000 --verify --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verified"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "k3-generic_2000.json"));
  const auto csv = lines_of(path("k3-generic_2000.csv"));
  ASSERT_EQ(csv.size(), 121u);
  EXPECT_EQ(csv[0], "bin_center,count,expected_density");
  std::ifstream json(dir_ / "k3-generic_2000.json");
  std::stringstream text;
  text << json.rdbuf();
  EXPECT_NE(text.str().find("\"lambda\": \"2\""), std::string::npos);
  EXPECT_EQ(text.str().find("threads"), std::string::npos);
}

TEST_F(CliTest, K3ReportsAreThreadIndependent) {
  ASSERT_EQ(run("--threads 1 k3 --lambda=-4 --pmax 3000 --out " + path("a")).code, 0);
  ASSERT_EQ(run("--threads 3 k3 --lambda=-4 --pmax 3000 --out " + path("b")).code, 0);
  std::ifstream a(path("a/k3-cm-plus_3000.json")), b(path("b/k3-cm-plus_3000.json"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_FALSE(sa.str().empty());
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, ArgumentErrorsExitTwo) {
  EXPECT_EQ(run("k3 --lambda 0").code, 2);
  EXPECT_EQ(run("k3 --lambda -1").code, 2);
  EXPECT_EQ(run("k3 --lambda 1/0").code, 2);
  EXPECT_EQ(run("trace 7 --pmax 10").code, 2);
  EXPECT_EQ(run("dq --curve1 7,13 --curve2 7,13 --pmax 1000").code, 2);
  EXPECT_EQ(run("density --law nope").code, 2);
  EXPECT_EQ(run("selberg --interval 2,1 --M 5").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(CliTest, NumericFailureExitsThree) {
  // Coefficients whose discriminant overflows 64-bit rationals.
  EXPECT_EQ(run("trace 4611686018427387904,1 --pmax 10").code, 3);
}

TEST_F(CliTest, DoubleQuadricCMPairLabel) {
  const auto r = run("dq --curve1=-11,-14 --curve2=-120,506 --pmax 3000 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("c3-atom"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "dq-cm-distinct-fields_3000.csv"));
}

TEST_F(CliTest, DensityDumpIntegratesToOne) {
  for (std::string law : {"batman", "sqrt-k3", "flying-batman", "arc-k3-plus", "c1", "c2-atom", "semicircle-st"}) {
    const auto file = path(law + ".csv");
    const auto r = run("density --law " + law + " --grid 4001 --out " + file);
    ASSERT_EQ(r.code, 0) << r.out;
    const auto lines = lines_of(file);
    ASSERT_EQ(lines[0], "t,density");
    std::vector<std::pair<double, double>> pts;
    std::size_t i = 1;
    for (; i < lines.size() && !lines[i].empty(); ++i) {
      const auto c = lines[i].find(',');
      pts.emplace_back(std::stod(lines[i].substr(0, c)), std::stod(lines[i].substr(c + 1)));
    }
    double total = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      total += 0.5 * (pts[k].second + pts[k - 1].second) * (pts[k].first - pts[k - 1].first);
    }
    ASSERT_LT(i + 1, lines.size() + 1);
    EXPECT_EQ(lines[i + 1], "atom_location,mass");
    for (std::size_t k = i + 2; k < lines.size(); ++k) {
      const auto c = lines[k].find(',');
      const auto mass = lines[k].substr(c + 1);
      const auto slash = mass.find('/');
      total += slash == std::string::npos ? std::stod(mass)
                                          : std::stod(mass.substr(0, slash)) / std::stod(mass.substr(slash + 1));
    }
    EXPECT_NEAR(total, 1.0, 0.05) << law;
  }
}

TEST_F(CliTest, DensityDumpBatmanSpotValue) {
  const auto file = path("b.csv");
  ASSERT_EQ(run("density-dump --law batman --grid 7 --out " + file).code, 0);
  const auto lines = lines_of(file);
  // Grid -3,-2,...,3 with the singular points +-1 skipped.
  EXPECT_EQ(lines[1], "-3,0");
  const double x = 0.0;
  const double want = ((3 + x) / std::sqrt(3 - 2 * x - x * x) + (3 - x) / std::sqrt(3 + 2 * x - x * x)) / (4 * M_PI);
  bool found = false;
  for (const auto& l : lines) {
    if (l.rfind("0,", 0) == 0) {
      EXPECT_NEAR(std::stod(l.substr(2)), want, 1e-12);
      found = true;
    }
    EXPECT_NE(l.rfind("1,", 0), 0u);
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, SelbergDumpRows) {
  const auto file = path("s.csv");
  ASSERT_EQ(run("selberg --interval 0.7,2.1 --M 17 --side minor --out " + file).code, 0);
  const auto lines = lines_of(file);
  EXPECT_EQ(lines[0], "m,coefficient");
  EXPECT_EQ(lines.size(), 19u);
  const auto stdout_run = run("selberg-dump --interval 0.7,2.1 --M 3");
  EXPECT_EQ(stdout_run.code, 0);
  EXPECT_EQ(std::count(stdout_run.out.begin(), stdout_run.out.end(), '\n'), 5);
}
