#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "btv/manifest.hpp"
#include "btv/matrix_market.hpp"
#include "fixture.hpp"

using namespace btv;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
Vector v1(double v) { return Vector::Constant(1, v); }

Json scalar_manifest() {
  return Json::parse(R"({
    "name": "scalar", "type": "lti",
    "matrices": {"A": [[-1]], "B": [[1]], "C": [[1]]},
    "x0": {"lb": [-1], "ub": [1]},
    "input": {"lb": [0], "ub": [1]},
    "spec": {"kind": "polytope", "polarity": "safe-region", "Gamma": [[1]], "Psi": [-2]},
    "t_f": 5
  })");
}

}  // namespace

TEST(Model, ScalarManifestParses) {
  const auto p = parse_problem_json(scalar_manifest(), ".");
  EXPECT_FALSE(p.is_pss());
  EXPECT_EQ(p.n(), 1);
  EXPECT_EQ(p.m(), 1);
  EXPECT_EQ(p.p(), 1);
  EXPECT_DOUBLE_EQ(p.t_f, 5.0);
  ASSERT_EQ(p.specs.size(), 1u);
  EXPECT_TRUE(spec_satisfied(p.specs[0], v1(2.0)));
  EXPECT_FALSE(spec_satisfied(p.specs[0], v1(2.1)));
}

TEST(Model, DimensionMismatchNamesMatrix) {
  auto doc = scalar_manifest();
  doc["matrices"]["B"] = Json::parse("[[1],[2]]");
  try {
    parse_problem_json(doc, ".");
    FAIL() << "expected a dimension error";
  } catch (const DimensionError& e) {
    EXPECT_EQ(e.name(), "B");
  }
}

TEST(Model, RejectsInvalidInputs) {
  EXPECT_THROW(HyperBox(v1(1.0), v1(0.0)), InvariantError);
  Matrix q(2, 2);
  q << 1, 0.5, 0.4, 1;
  EXPECT_THROW(EllipsoidSpec(q, Vector::Zero(2), 1.0, Polarity::kSafeRegion), InvariantError);
  EXPECT_THROW(EllipsoidSpec(-Matrix::Identity(2, 2), Vector::Zero(2), 1.0,
                             Polarity::kSafeRegion),
               InvariantError);
  EXPECT_THROW(LtiSystem(Matrix::Identity(2, 2), Matrix::Ones(3, 1), Matrix::Ones(1, 2)),
               DimensionError);
  EXPECT_THROW(PssSystem({}, {}, {}), InvariantError);
  auto doc = scalar_manifest();
  doc["t_f"] = -1;
  EXPECT_THROW(parse_problem_json(doc, "."), Error);
  doc = scalar_manifest();
  doc["matrices"]["A"] = "missing.mtx";
  try {
    parse_problem_json(doc, "/nonexistent-dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing.mtx"), std::string::npos);
  }
}

TEST(Model, MotorManifestIsTwoModePss) {
  const auto p = parse_problem(std::string(BTV_DATA_DIR) + "/motor/manifest.json");
  ASSERT_TRUE(p.is_pss());
  EXPECT_EQ(p.pss().size(), 2u);
  EXPECT_DOUBLE_EQ(p.pss().durations()[0], 0.1);
  EXPECT_DOUBLE_EQ(p.pss().durations()[1], 0.15);
  EXPECT_EQ(p.n(), 8);
  EXPECT_EQ(p.m(), 2);
  EXPECT_EQ(p.p(), 2);
  EXPECT_EQ(p.specs.size(), 2u);
  for (const auto& mode : p.pss().modes()) EXPECT_TRUE(check_stability(mode).stable);
}

TEST(Model, StabilityExamples) {
  auto r = check_stability(LtiSystem(m1(-1), m1(1), m1(1)));
  EXPECT_TRUE(r.stable);
  EXPECT_DOUBLE_EQ(r.spectral_abscissa, -1.0);
  Matrix osc(2, 2);
  osc << 0, 1, -1, 0;
  r = check_stability(LtiSystem(osc, Matrix::Ones(2, 1), Matrix::Ones(1, 2)));
  EXPECT_FALSE(r.stable);
  EXPECT_NEAR(r.spectral_abscissa, 0.0, 1e-14);
  EXPECT_THROW(require_hurwitz(LtiSystem(osc, Matrix::Ones(2, 1), Matrix::Ones(1, 2)), "A"),
               NotHurwitzError);
}

TEST(Model, MotorModeEigenvaluesFromPrintedBlock) {
  // The 4x4 block of the motor model repeated on the diagonal; its spectrum
  // decides stability of the whole 8-dimensional mode.
  const auto p = parse_problem(std::string(BTV_DATA_DIR) + "/motor/manifest.json");
  const Matrix& a = p.pss().modes()[0].A();
  Eigen::EigenSolver<Matrix> es(a.topLeftCorner(4, 4));
  EXPECT_LT(es.eigenvalues().real().maxCoeff(), 0.0);
  EXPECT_NEAR(spectral_abscissa(a), es.eigenvalues().real().maxCoeff(), 1e-9);
}

TEST(Model, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    GeneratorOptions go;
    go.n = 3 + trial;
    go.m = 2;
    go.p = 2;
    go.seed = 100 + trial;
    const auto p = random_problem(go);
    const auto dir = fixture::scratch_dir("roundtrip" + std::to_string(trial));
    const auto path = write_problem(p, dir);
    EXPECT_TRUE(parse_problem(path) == p);
  }
  const auto motor = parse_problem(std::string(BTV_DATA_DIR) + "/motor/manifest.json");
  const auto dir = fixture::scratch_dir("roundtrip-motor");
  EXPECT_TRUE(parse_problem(write_problem(motor, dir)) == motor);
}

TEST(Model, MatrixMarketFormats) {
  std::istringstream coord(
      "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 2\n1 1 1.5\n2 3 -2\n");
  Matrix c = mm::read(coord);
  EXPECT_EQ(c.rows(), 2);
  EXPECT_EQ(c.cols(), 3);
  EXPECT_DOUBLE_EQ(c(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(c(1, 2), -2.0);
  EXPECT_DOUBLE_EQ(c(0, 1), 0.0);
  std::istringstream sym("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 3\n");
  Matrix s = mm::read(sym);
  EXPECT_DOUBLE_EQ(s(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 3.0);
  std::istringstream arr("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  Matrix a = mm::read(arr);
  EXPECT_DOUBLE_EQ(a(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 3.0);
  std::istringstream bad("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n");
  EXPECT_THROW(mm::read(bad), ParseError);

  Matrix r(2, 2);
  r << 0.1, 1.0 / 3.0, -2e-300, 7e12;
  std::ostringstream out;
  mm::write(out, r);
  std::istringstream back(out.str());
  EXPECT_TRUE(mm::read(back) == r);
}

TEST(Model, SpecPolarityAndSatisfaction) {
  Matrix q = Matrix::Identity(2, 2);
  EllipsoidSpec unsafe(q, Vector::Zero(2), 1.0, Polarity::kUnsafeRegion);
  Vector inside(2), outside(2);
  inside << 0.5, 0.0;
  outside << 2.0, 0.0;
  EXPECT_FALSE(spec_satisfied(unsafe, inside));
  EXPECT_TRUE(spec_satisfied(unsafe, outside));
  const auto j = spec_to_json(unsafe);
  EXPECT_EQ(j["polarity"], "unsafe-region");
  EXPECT_TRUE(std::get<EllipsoidSpec>(spec_from_json(j)) == unsafe);
}

TEST(Model, BoxHelpers) {
  Vector lb(3), ub(3);
  lb << -1, 2, 0;
  ub << 1, 2, 0.5;
  HyperBox b(lb, ub);
  EXPECT_EQ(b.free_coordinates(), (std::vector<Index>{0, 2}));
  EXPECT_DOUBLE_EQ(b.sup_norm(), 2.0);
  EXPECT_TRUE(b.contains(b.center()));
  EXPECT_FALSE(b.contains(Vector::Constant(3, 3.0)));
}
