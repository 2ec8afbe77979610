#include "hens/builtins.hpp"
#include "hens/profiles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hens;

namespace {

const std::vector<double> kScales{1.0, 0.5, 0.25};

ProfileOptions small_options(int samples = 8, std::uint64_t seed = 3) {
  ProfileOptions o;
  o.samples = samples;
  o.seed = seed;
  return o;
}

/// contact3(1,0,1) and its nilpotentization, shared by several tests.
const ProfileCurve& contact_profile() {
  static const ProfileCurve c = metric_profile(contact3(1, 0, 1), Vec::Zero(3), kScales, small_options(10));
  return c;
}

const ProfileCurve& contact_nilpotent_profile() {
  static const ProfileCurve c =
      metric_profile(nilpotentize(contact3(1, 0, 1)), Vec::Zero(3), kScales, small_options(10));
  return c;
}

Vec random_vec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST(MetricProfile, ScaleCovariance) {
  auto p = metric_profile(heisenberg1(), Vec::Zero(3), kScales, small_options(6));
  ASSERT_EQ(p.samples.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(p.samples[k].eps, kScales[k]);
    EXPECT_LT(max_abs(Mat(p.samples[k].distances - p.raw[k].sample.distances / kScales[k])), 1e-15);
    EXPECT_LE(p.samples[k].diameter(), 2.0 + 1e-12);
  }
  EXPECT_EQ(p.kind, ProfileKind::metric);
}

TEST(MetricProfile, HeisenbergConeIsConstant) {
  Vec x(3);
  x << 0.4, -0.2, 0.7;
  auto p = metric_profile(heisenberg1(), x, kScales, small_options());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_LE(gh_distance(p.samples[i], p.samples[j]).upper, 0.05);
}

TEST(MetricProfile, EuclideanConeIsConstant) {
  auto p = metric_profile(abelian(2), Vec::Zero(2), kScales, small_options());
  for (std::size_t i = 1; i < 3; ++i) EXPECT_LE(gh_distance(p.samples[0], p.samples[i]).upper, 1e-5);
}

TEST(MetricProfile, RejectsBadScales) {
  EXPECT_THROW(metric_profile(heisenberg1(), Vec::Zero(3), {0.5, 1.0}), DomainError);
  EXPECT_THROW(metric_profile(heisenberg1(), Vec::Zero(3), {1.0, -0.5}), DomainError);
  EXPECT_THROW(metric_profile(heisenberg1(), Vec::Zero(3), {}), DomainError);
  EXPECT_THROW(metric_profile(heisenberg1(), Vec::Zero(2), {1.0}), DimensionError);
}

TEST(MetricProfile, ContactDriftsTowardHeisenberg) {
  auto h = metric_profile(heisenberg1(), Vec::Zero(3), kScales, small_options(10));
  std::vector<double> gh;
  for (std::size_t k = 0; k < 3; ++k) gh.push_back(gh_distance(contact_profile().samples[k], h.samples[k]).upper);
  for (std::size_t k = 1; k < 3; ++k) EXPECT_LE(gh[k], gh[k - 1] * 1.2) << k;
  EXPECT_LT(gh[2], gh[0]);
}

TEST(DilatationProfile, CarnotConeIsConstant) {
  auto p = dilatation_profile(heisenberg1(), kScales, small_options());
  EXPECT_EQ(p.kind, ProfileKind::dilatation);
  for (std::size_t k = 1; k < 3; ++k) EXPECT_LE(gh_distance(p.samples[0], p.samples[k]).upper, 0.05);
}

TEST(DilatationProfile, ContactParametersFlow) {
  for (double eps : kScales) {
    auto lhs = dilatation_star(contact3(0.7, 0.3, 1.3), eps);
    auto rhs = contact3(0.7 * eps * eps, 0.3, 1.3 * eps);
    EXPECT_LT(structure_distance(lhs, rhs), 1e-12);
  }
}

TEST(DilatationProfile, ScalingRelation) {
  // P(sigma)(a eps) against P(delta_a^{-1} * sigma)(eps) at a = eps = 1/2.
  auto sigma = contact3(1, 0, 1);
  auto left = dilatation_profile(sigma, {0.25}, small_options());
  auto opt = small_options();
  opt.cc.seed = 77;
  auto right = dilatation_profile(dilatation_star(sigma, 0.5), {0.5}, opt);
  EXPECT_LE(gh_distance(left.samples[0], right.samples[0]).upper, 0.05);
}

TEST(DilatationProfile, RejectsNonEnsemble) {
  // c, d != 0 with a != 0 violates the Jacobi identity
  auto bad = so3_surface(1.0, 1.0, 0.5, 0.3);
  EXPECT_THROW(dilatation_profile(bad, kScales, small_options()), ValidationError);
}

TEST(ScalarDot, MetricProfileRelation) {
  // P^m(sigma)(a eps) against P^m(a^{-1} . sigma)(eps) at a = eps = 1/2.
  auto sigma = contact3(1, 0, 1);
  auto left = metric_profile(sigma, Vec::Zero(3), {0.25}, small_options());
  auto opt = small_options();
  opt.cc.seed = 91;
  auto right = metric_profile(scalar_dot(sigma, 2.0), Vec::Zero(3), {0.5}, opt);
  EXPECT_LE(gh_distance(left.samples[0], right.samples[0]).upper, 0.05);
  EXPECT_TRUE(scalar_dot(sigma, 3.0).metric().isApprox(9.0 * sigma.metric()));
}

TEST(ProfileEquivalence, SelfIsConsistent) {
  auto p = metric_profile(heisenberg1(), Vec::Zero(3), kScales, small_options(6));
  auto r = profile_equivalence(p, p);
  EXPECT_TRUE(r.consistent);
  for (double u : r.upper) EXPECT_EQ(u, 0.0);
}

TEST(ProfileEquivalence, DistinctConesDoNotDecay) {
  auto h = metric_profile(heisenberg1(), Vec::Zero(3), kScales, small_options());
  auto e = metric_profile(abelian(3), Vec::Zero(3), kScales, small_options());
  auto r = profile_equivalence(h, e);
  EXPECT_FALSE(r.consistent) << r.verdict;
  EXPECT_GT(r.upper.back(), 0.05);
  EXPECT_LT(r.decay_exponent, 0.0);
}

TEST(ProfileEquivalence, ContactAgainstNilpotentization) {
  auto r = profile_equivalence(contact_profile(), contact_nilpotent_profile());
  EXPECT_TRUE(r.consistent) << r.verdict << " ratios " << r.ratio[0] << " " << r.ratio[1] << " " << r.ratio[2];
  EXPECT_GT(r.decay_exponent, 0.0);
}

TEST(ProfileEquivalence, ScaleMismatch) {
  auto p = metric_profile(heisenberg1(), Vec::Zero(3), {1.0, 0.5}, small_options(4));
  auto q = metric_profile(heisenberg1(), Vec::Zero(3), {1.0, 0.25}, small_options(4));
  auto s = metric_profile(heisenberg1(), Vec::Zero(3), {1.0}, small_options(4));
  EXPECT_THROW(profile_equivalence(p, q), DomainError);
  EXPECT_THROW(profile_equivalence(p, s), DomainError);
}

TEST(Transport, IdentityAndIsomorphism) {
  auto alg = heisenberg_so2();
  auto same = transport(alg, Mat::Identity(4, 4));
  EXPECT_LT(structure_distance(same, alg), 1e-15);
  EXPECT_TRUE(same.metric().isApprox(alg.metric()));

  Mat F = Mat::Zero(4, 4);
  F(0, 0) = 2.0;
  F.block(1, 1, 2, 2) << 1.0, 0.5, -0.3, 2.0;
  F(3, 3) = 0.7;
  Mat conformal = F;
  conformal.block(1, 1, 2, 2) << 1.2, -1.6, 1.6, 1.2;
  auto moved = transport(alg, F);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    Vec x = random_vec(rng, 4), y = random_vec(rng, 4);
    Vec lhs = bracket(moved, F * x, F * y);
    Vec rhs = F * bracket(alg, x, y);
    EXPECT_LT(max_abs(Vec(lhs - rhs)), 1e-13);
    Vec u = x.head(3), v = y.head(3);
    Mat fh = F.topLeftCorner(3, 3);
    EXPECT_NEAR((fh * u).dot(moved.metric() * (fh * v)), u.dot(alg.metric() * v), 1e-13);
  }
  // the transported rep stays antisymmetric when F is conformal on V1
  EXPECT_TRUE(validate_ensemble(transport(alg, conformal), Profile::homogeneous_space).passed());
  EXPECT_TRUE(validate_ensemble(moved, Profile::homogeneous_ensemble).find("home-c")->status == AxiomStatus::pass);
}

TEST(Transport, Errors) {
  auto alg = heisenberg1();
  Mat mixing = Mat::Identity(3, 3);
  mixing(2, 0) = 1.0;
  EXPECT_THROW(transport(alg, mixing), DomainError);
  Mat singular = Mat::Identity(3, 3);
  singular(1, 1) = 0.0;
  EXPECT_THROW(transport(alg, singular), DomainError);
  EXPECT_THROW(transport(alg, Mat::Identity(2, 2)), DimensionError);
}

TEST(DilatationStar, ComposesMultiplicatively) {
  auto alg = contact3(0.9, 0.4, 1.1);
  for (auto [a, b] : {std::pair{0.5, 0.25}, std::pair{0.3, 2.0}}) {
    auto lhs = dilatation_star(dilatation_star(alg, a), b);
    auto rhs = dilatation_star(alg, a * b);
    EXPECT_LT(structure_distance(lhs, rhs), 1e-14);
  }
  auto cone = heisenberg1();
  EXPECT_EQ(structure_distance(dilatation_star(cone, 0.3), cone), 0.0);
}
