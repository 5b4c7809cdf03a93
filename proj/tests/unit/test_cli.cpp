#include <array>
#include <map>
#include <set>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "btv/manifest.hpp"
#include "fixture.hpp"

using namespace btv;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(BTV_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_scalar(const fs::path& dir) {
  std::ofstream(dir / "manifest.json") << R"({
    "name": "scalar", "type": "lti",
    "matrices": {"A": "A.mtx", "B": [[2]], "C": [[3]]},
    "x0": {"lb": [-1], "ub": [1]},
    "input": {"lb": [0], "ub": [1]},
    "spec": {"kind": "polytope", "polarity": "safe-region", "Gamma": [[1]], "Psi": [-2]},
    "t_f": 5
  })";
  std::ofstream(dir / "A.mtx") << "%%MatrixMarket matrix array real general\n1 1\n-1\n";
  return dir / "manifest.json";
}

const std::string kMotor = std::string(BTV_DATA_DIR) + "/motor/manifest.json";

}  // namespace

TEST(Cli, ReduceScalarWritesSigma) {
  const auto dir = fixture::scratch_dir("cli-reduce");
  const auto manifest = write_scalar(dir);
  const auto r = run("reduce " + manifest.string() + " --output " + (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const Json sigma = Json::parse(slurp(dir / "out" / "sigma.json"));
  ASSERT_EQ(sigma["sigma"].size(), 1u);
  EXPECT_NEAR(sigma["sigma"][0].get<double>(), 3.0, 1e-12);
  EXPECT_EQ(sigma["format_version"], 1);
}

TEST(Cli, ReduceAtFullOrderSimulatesIdentically) {
  const auto dir = fixture::scratch_dir("cli-reduce-full");
  ASSERT_EQ(run("gen --n 5 --m 2 --p 1 --seed 4 --output " + (dir / "in").string()).code, 0);
  const auto r = run("reduce " + (dir / "in" / "manifest.json").string() + " -k 5 --output " +
                     (dir / "out").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto full = parse_problem(dir / "in" / "manifest.json");
  const auto red = parse_problem(dir / "out" / "manifest.json");
  const auto bal = balance(full.lti());
  std::mt19937_64 rng(1);
  const Vector x = fixture::random_point(rng, full.x0);
  const auto u = fixture::random_signal(rng, full.inputs, 3.0, 4, false);
  const auto a = simulate(full.lti(), x, u, 3.0, 0.01);
  const auto b = simulate(red.lti(), bal.H * x, u, 3.0, 0.01);
  ASSERT_EQ(a.y.size(), b.y.size());
  for (std::size_t s = 0; s < a.y.size(); ++s) EXPECT_LT((a.y[s] - b.y[s]).norm(), 1e-9);
  EXPECT_TRUE(red.x0.contains(bal.H * x, 1e-12));
}

TEST(Cli, MissingMatrixFileNamesPath) {
  const auto dir = fixture::scratch_dir("cli-missing");
  const auto manifest = write_scalar(dir);
  fs::remove(dir / "A.mtx");
  const auto r = run("reduce " + manifest.string());
  EXPECT_GE(r.code, 3);
  EXPECT_NE(r.out.find("A.mtx"), std::string::npos) << r.out;
}

TEST(Cli, BenchHasMotorRowsAndIsReproducible) {
  const auto a = run("bench --seed 3 --e1 theorem1,theorem2 --e2 theorem3,simulation");
  const auto b = run("bench --seed 3 --e1 theorem1,theorem2 --e2 theorem3,simulation");
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  std::set<int> ks;
  for (const auto& row : j["rows"]) {
    EXPECT_EQ(row["benchmark"], "motor");
    EXPECT_FALSE(row.contains("seconds"));
    ks.insert(row["k"].get<int>());
  }
  EXPECT_EQ(ks, (std::set<int>{4, 5}));
  const auto notice = run("bench --extra /nonexistent/slicot --e1 theorem1 --e2 theorem3");
  EXPECT_EQ(notice.code, 0);
  EXPECT_NE(notice.out.find("skipped /nonexistent/slicot"), std::string::npos);
  const auto text = run("bench --format text --timing --e1 theorem1 --e2 theorem3");
  EXPECT_NE(text.out.find("time[s]"), std::string::npos);
}

TEST(Cli, GenIsDeterministicAndStable) {
  const auto d1 = fixture::scratch_dir("cli-gen1"), d2 = fixture::scratch_dir("cli-gen2");
  ASSERT_EQ(run("gen --n 4 --seed 11 --output " + d1.string()).code, 0);
  ASSERT_EQ(run("gen --n 4 --seed 11 --output " + d2.string()).code, 0);
  for (const char* f : {"manifest.json", "A.mtx", "B.mtx", "C.mtx"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  EXPECT_TRUE(check_stability(parse_problem(d1 / "manifest.json").lti()).stable);
  const auto bad = run("gen --n 3 --p 3 --output " + d1.string());
  EXPECT_GE(bad.code, 3);
}

TEST(Cli, HelpDocumentsFlagsAndUnknownFlagsFail) {
  const std::map<std::string, std::vector<std::string>> flags{
      {"reduce", {"--order"}},
      {"bounds", {"--order", "--e1", "--e2", "--gamma", "--vertex-cap"}},
      {"transform-spec", {"--delta"}},
      {"reach", {"--order", "--step-h", "--csv", "--full"}},
      {"verify", {"--k0", "--k-max", "--step-h", "--witness-budget", "--no-confirm",
                  "--geometric", "--time-budget", "--e1", "--gamma"}},
      {"verify-pss", {"--k0", "--k-max", "--witness-budget"}},
      {"bench", {"--data-dir", "--extra", "--order"}},
      {"gen", {"--n", "--m", "--p", "--skew-scale", "--t-f"}}};
  for (const auto& [cmd, names] : flags) {
    const auto r = run(cmd + " --help");
    EXPECT_EQ(r.code, 0) << cmd;
    for (const auto& f : names) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " " << f;
  }
  const auto top = run("--help");
  for (const char* f : {"--seed", "--threads", "--output", "--format"})
    EXPECT_NE(top.out.find(f), std::string::npos) << f;
  EXPECT_GE(run("verify " + kMotor + " --no-such-flag").code, 3);
  EXPECT_GE(run("frobnicate").code, 3);
  EXPECT_GE(run("bounds " + kMotor + " --format yaml").code, 3);
}

TEST(Cli, VerifyExitCodes) {
  const auto r = run("verify-pss " + kMotor + " --k0 5 --k-max 5");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(Json::parse(r.out)["outcome"], "safe");
  EXPECT_GE(run("verify " + kMotor).code, 3);  // PSS manifest given to verify
  const auto dir = fixture::scratch_dir("cli-verify");
  ASSERT_EQ(run("gen --n 5 --m 2 --p 1 --seed 2 --output " + dir.string()).code, 0);
  EXPECT_EQ(run("verify " + (dir / "manifest.json").string()).code, 0);
}

TEST(Cli, TransformSpecAndReach) {
  const auto dir = fixture::scratch_dir("cli-transform");
  std::ofstream(dir / "spec.json") << R"({
    "spec": {"kind": "ellipsoid", "polarity": "unsafe-region",
             "Q": [[178, 0], [0, 625]], "a": [0.325, 0.16], "R": 1},
    "delta": [0.0234, 0.0189]})";
  const auto r = run("transform-spec " + (dir / "spec.json").string());
  ASSERT_EQ(r.code, 0) << r.out;
  const Json j = Json::parse(r.out);
  const double radius = j["transformed"][0]["unsafe_region"]["R"].get<double>();
  EXPECT_GT(radius, 1.56);
  EXPECT_LT(radius, 1.57);

  const auto reach = run("reach " + kMotor + " -k 5 --csv " + (dir / "boxes.csv").string());
  ASSERT_EQ(reach.code, 0) << reach.out;
  const Json rj = Json::parse(reach.out);
  ASSERT_EQ(rj["modes"].size(), 2u);
  EXPECT_FALSE(rj["modes"][0]["reach"]["steps"].empty());
  const std::string csv = slurp(dir / "boxes.csv");
  EXPECT_EQ(csv.rfind("mode,t0,t1,y1_lo,y1_hi,y2_lo,y2_hi", 0), 0u);
}

TEST(Cli, BoundsTableFormats) {
  const auto text = run("bounds " + kMotor + " -k 4 -k 5 --format text --e1 theorem1 --e2 theorem3");
  ASSERT_EQ(text.code, 0) << text.out;
  EXPECT_NE(text.out.find("delta"), std::string::npos);
  const auto csv = run("bounds " + kMotor + " -k 5 --format csv --e1 theorem2 --e2 theorem3");
  ASSERT_EQ(csv.code, 0) << csv.out;
  EXPECT_EQ(csv.out.rfind("mode,k,e1,e2,delta", 0), 0u);
  EXPECT_GE(run("bounds " + kMotor + " -k 2").code, 3);
}
