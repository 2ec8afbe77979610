#include "hens/builtins.hpp"
#include "hens/cc_metric.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace hens;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

CcOptions fast_options(std::uint64_t seed = 3) {
  CcOptions o;
  o.segments = 16;
  o.restarts = 3;
  o.seed = seed;
  return o;
}

/// Reads a numeric field from the flat oracle fixture.
double fixture_value(const std::string& key) {
  std::ifstream in(std::string(HENS_FIXTURE_DIR) + "/heisenberg_cc_vertical.json");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) throw std::runtime_error("fixture key missing: " + key);
  pos = text.find(':', pos);
  return std::stod(text.substr(pos + 1));
}

}  // namespace

TEST(DlOperator, MatchesIntegralOfExponential) {
  // int_0^1 exp(s A) ds is the top-right block of exp([[A, I], [0, 0]]).
  auto alg = so3_surface(1.0, 1.0);
  Vec x = vec3(0.3, -0.7, 0.4);
  Mat a = ad_matrix(alg, x);
  Mat block = Mat::Zero(6, 6);
  block.topLeftCorner(3, 3) = a;
  block.topRightCorner(3, 3) = Mat::Identity(3, 3);
  Mat e = block.exp();
  auto r = dl_operator(alg, x);
  EXPECT_LT(max_abs(Mat(r.value - e.topRightCorner(3, 3))), 1e-13);
  EXPECT_FALSE(r.outside_convergence);
}

TEST(DlOperator, TerminatesOnNilpotent) {
  auto r = dl_operator(heisenberg1(), vec3(1, 2, 3));
  Mat expected = Mat::Identity(3, 3) + 0.5 * ad_matrix(heisenberg1(), vec3(1, 2, 3));
  EXPECT_LT(max_abs(Mat(r.value - expected)), 1e-15);
  EXPECT_EQ(r.terms, 2);
  EXPECT_TRUE(dl_operator(so3_surface(1, 1), vec3(7, 0, 0)).outside_convergence);
}

TEST(PathModel, JacobianMatchesFiniteDifferences) {
  for (const auto& alg : {filiform4(), so3_surface(1.0, 2.0)}) {
    PathModel model(alg, 5);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 0.7);
    Mat u(5, alg.horizontal_dim());
    for (int k = 0; k < u.size(); ++k) u.data()[k] = g(rng);
    Vec end;
    Mat jac;
    model.endpoint_jacobian(u, &end, &jac);
    EXPECT_LT(max_abs(Vec(end - model.endpoint(u, Vec::Zero(alg.dim())))), 1e-13);
    const double h = 1e-6;
    for (int k = 0; k < 5; ++k) {
      for (int a = 0; a < alg.horizontal_dim(); ++a) {
        Mat up = u, um = u;
        up(k, a) += h;
        um(k, a) -= h;
        Vec fd = (model.endpoint(up, Vec::Zero(alg.dim())) - model.endpoint(um, Vec::Zero(alg.dim()))) / (2 * h);
        EXPECT_LT(max_abs(Vec(fd - jac.col(k * alg.horizontal_dim() + a))), 1e-7) << alg.name();
      }
    }
  }
}

TEST(PathModel, LengthAndConcatenation) {
  auto alg = heisenberg1();
  PathModel m4(alg, 4);
  Mat u(4, 2);
  u << 1, 0, 0, 1, -1, 0, 0, -1;
  EXPECT_NEAR(m4.length(u), 1.0, 1e-15);
  // unit square traversed counterclockwise encloses area 1/16
  EXPECT_LT(max_abs(Vec(m4.endpoint(u, Vec::Zero(3)) - vec3(0, 0, 1.0 / 16.0))), 1e-15);
  Mat back = reverse_controls(u);
  Mat both = concat_controls(u, back);
  PathModel m8(alg, 8);
  EXPECT_LT(max_abs(m8.endpoint(both, Vec::Zero(3))), 1e-15);
  EXPECT_NEAR(m8.length(both), 2.0, 1e-15);
  EXPECT_THROW(m4.length(Mat::Zero(3, 2)), DimensionError);
}

TEST(CcDistance, EuclideanInAbelian) {
  auto alg = abelian(2).with_metric((Mat(2, 2) << 4, 0, 0, 1).finished());
  Vec x(2), y(2);
  x << 1, 1;
  y << 2, 3;
  auto r = cc_distance(alg, x, y, fast_options());
  EXPECT_NEAR(r.upper, std::sqrt(4.0 + 4.0), 1e-6);
  EXPECT_NEAR(r.lower_projection, std::sqrt(8.0), 1e-12);
  EXPECT_TRUE(r.feasible);
}

TEST(CcDistance, HeisenbergHorizontalUnit) {
  CcOptions opt;
  opt.seed = 5;
  auto r = cc_distance(heisenberg1(), Vec::Zero(3), vec3(1, 0, 0), opt);
  EXPECT_NEAR(r.upper, 1.0, 0.01);
  EXPECT_LE(r.endpoint_residual, 1e-6);
  EXPECT_NEAR(r.lower_projection, 1.0, 1e-12);
}

TEST(CcDistance, HeisenbergVerticalAgainstOracle) {
  CcOptions opt;
  opt.seed = 9;
  auto r = cc_distance(heisenberg1(), Vec::Zero(3), vec3(0, 0, 1), opt);
  const double polygon = fixture_value("polygon_distance");
  const double continuum = fixture_value("continuum_distance");
  EXPECT_NEAR(r.upper, polygon, 0.02 * polygon);
  EXPECT_GE(r.upper, continuum * (1.0 - 1e-6));
  EXPECT_TRUE(r.feasible);
}

TEST(CcDistance, HomogeneousSymmetricLeftInvariant) {
  auto alg = heisenberg1();
  BchEngine eng(alg);
  Vec x = vec3(0.2, -0.1, 0.3), y = vec3(-0.4, 0.5, -0.2);
  const double d = cc_distance(alg, x, y, fast_options(1)).upper;
  const double d_rev = cc_distance(alg, y, x, fast_options(2)).upper;
  EXPECT_NEAR(d_rev, d, 0.03 * d);
  for (double eps : {0.5, 0.25}) {
    double de = cc_distance(alg, dilate(alg, eps, x), dilate(alg, eps, y), fast_options(4)).upper;
    EXPECT_NEAR(de, eps * d, 0.02 * eps * d);
  }
  Vec p = vec3(1.0, 2.0, -3.0);
  double dl = cc_distance(alg, eng.product(p, x), eng.product(p, y), fast_options(7)).upper;
  EXPECT_NEAR(dl, d, 0.02 * d);
}

TEST(CcDistance, D0MotionIsFree) {
  // Pure isotropy rotation: reachable by D0 controls at zero length.
  auto alg = so3_surface(1.0, 1.0);
  Vec target = vec3(0.5, 0.0, 0.0);
  auto r = cc_distance(alg, Vec::Zero(3), target, fast_options());
  EXPECT_LT(r.upper, 1e-3);
  EXPECT_TRUE(r.approximate_integration);
  EXPECT_EQ(r.lower_projection, 0.0);
}

TEST(CcDistance, ZeroAndErrors) {
  auto alg = heisenberg1();
  auto r = cc_distance(alg, vec3(1, 2, 3), vec3(1, 2, 3), fast_options());
  EXPECT_EQ(r.upper, 0.0);
  PathModel model(alg, 8);
  EXPECT_THROW(cc_distance(model, Vec::Zero(3), vec3(1, 0, 0), fast_options()), DomainError);
  EXPECT_THROW(cc_distance(alg, Vec::Zero(2), vec3(1, 0, 0), fast_options()), DimensionError);
  EXPECT_THROW(PathModel(alg, 0), DomainError);
}

TEST(BallSample, Properties) {
  auto alg = heisenberg1();
  BallSampleOptions opt;
  opt.count = 6;
  opt.cc = fast_options(13);
  opt.cc.restarts = 1;
  Vec center = vec3(0.3, 0.1, -0.2);
  auto s = ball_sample(alg, center, 0.5, opt);
  const Mat& d = s.sample.distances;
  ASSERT_EQ(d.rows(), 6);
  EXPECT_EQ(s.sample.base, 0);
  EXPECT_TRUE(s.points[0].isApprox(center));
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(d(i, i), 0.0);
    EXPECT_LE(d(0, i), 0.5 + 1e-12);
    EXPECT_LE(s.witness_lengths[static_cast<std::size_t>(i)], 0.5 + 1e-12);
    for (int j = 0; j < 6; ++j) {
      EXPECT_EQ(d(i, j), d(j, i));
      EXPECT_LE(d(i, j), 1.0 + 1e-12);
      if (i != j) EXPECT_GT(d(i, j), 0.0);
    }
  }
  // witness endpoints are reproducible from the point seed
  auto again = ball_sample(alg, center, 0.5, opt);
  for (int i = 0; i < 6; ++i) EXPECT_TRUE(again.points[static_cast<std::size_t>(i)].isApprox(s.points[static_cast<std::size_t>(i)]));
  EXPECT_THROW(ball_sample(alg, center, -1.0, opt), DomainError);
}
