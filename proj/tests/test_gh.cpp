#include "hens/gh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace hens;

namespace {

PointedSample make_sample(const Mat& d, int base = 0) {
  PointedSample s;
  s.distances = d;
  s.base = base;
  return s;
}

/// Random finite metric: points in the plane with the Euclidean distance.
PointedSample random_planar(int n, std::uint64_t seed, double radius = 0.9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius / std::sqrt(2.0), radius / std::sqrt(2.0));
  std::vector<std::pair<double, double>> p(static_cast<std::size_t>(n));
  for (auto& q : p) q = {u(rng), u(rng)};
  Mat d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d(i, j) = std::hypot(p[static_cast<std::size_t>(i)].first - p[static_cast<std::size_t>(j)].first,
                           p[static_cast<std::size_t>(i)].second - p[static_cast<std::size_t>(j)].second);
  return make_sample(d);
}

/// Coupling level of an explicit metric on the disjoint union (A first):
/// least e with d(x,y) < e and each side's points within 1/e of its base
/// lying within e of the other side. Infinity if the matrix is not a metric.
double coupling_level(const Mat& full, int na, int base_a, int base_b) {
  if (triangle_violation(full) > 1e-12) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(full.rows());
  std::vector<double> cand{full(base_a, na + base_b)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cand.push_back(full(i, j));
      if (full(i, j) > 0) cand.push_back(1.0 / full(i, j));
    }
  std::sort(cand.begin(), cand.end());
  for (double e : cand) {
    if (!(full(base_a, na + base_b) <= e)) continue;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const bool in_a = i < na;
      const int base = in_a ? base_a : na + base_b;
      if (e > 0 && full(base, i) >= 1.0 / e) continue;
      double near = std::numeric_limits<double>::infinity();
      for (int j = in_a ? na : 0; j < (in_a ? n : na); ++j) near = std::min(near, full(i, j));
      if (near > e) ok = false;
    }
    if (ok) return e;
  }
  return std::numeric_limits<double>::infinity();
}

/// Exhaustive grid search over all cross-distance blocks.
double grid_oracle(const PointedSample& A, const PointedSample& B, double step, double top) {
  const int na = A.size(), nb = B.size(), n = na + nb;
  const int levels = static_cast<int>(std::round(top / step)) + 1;
  const int cells = na * nb;
  std::vector<int> idx(static_cast<std::size_t>(cells), 0);
  Mat full = Mat::Zero(n, n);
  full.topLeftCorner(na, na) = A.distances;
  full.bottomRightCorner(nb, nb) = B.distances;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (int c = 0; c < cells; ++c) {
      double v = idx[static_cast<std::size_t>(c)] * step;
      full(c / nb, na + c % nb) = full(na + c % nb, c / nb) = v;
    }
    best = std::min(best, coupling_level(full, na, A.base, B.base));
    int c = 0;
    while (c < cells && ++idx[static_cast<std::size_t>(c)] == levels) idx[static_cast<std::size_t>(c++)] = 0;
    if (c == cells) break;
  }
  return best;
}

/// Shortest-path metric of a random graph with edge weights in {0.1, ..., 0.5}.
PointedSample random_lattice_metric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> w(1, 5);
  Mat d = Mat::Constant(n, n, 10.0);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = 0.1 * w(rng);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return make_sample(d);
}

}  // namespace

TEST(GhExact, OnePointAgainstTwoPoints) {
  auto one = make_sample(Mat::Zero(1, 1));
  Mat d2(2, 2);
  d2 << 0, 1, 1, 0;
  auto two = make_sample(d2);
  auto r = gh_distance(one, two, {GhMode::exact});
  const double oracle = grid_oracle(one, two, 1e-3, 2.0);
  EXPECT_NEAR(r.upper, oracle, 1e-3);
  EXPECT_NEAR(r.upper, 0.5, 1e-12);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.lower, r.upper);
}

TEST(GhExact, MatchesCouplingGridOnSmallSpaces) {
  // Distances on a 0.1 lattice keep an optimal coupling on the 0.05 grid.
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto a = random_lattice_metric(seed % 2 ? 2 : 1, seed);
    auto b = random_lattice_metric(seed % 2 ? 2 : 3, seed + 100);
    const double oracle = grid_oracle(a, b, 0.05, 2.0);
    auto r = gh_distance(a, b, {GhMode::exact});
    EXPECT_NEAR(r.upper, oracle, 1e-9) << seed;
  }
  auto a = random_planar(2, 7);
  auto b = random_planar(1, 8);
  EXPECT_NEAR(gh_distance(a, b, {GhMode::exact}).upper, grid_oracle(a, b, 1e-3, 2.0), 1e-3);
}

TEST(GhExact, IdentityAndLimits) {
  auto a = random_planar(5, 11);
  EXPECT_EQ(gh_distance(a, a, {GhMode::exact}).upper, 0.0);
  auto big = random_planar(6, 12);
  EXPECT_THROW(gh_distance(a, big, {GhMode::exact}), DomainError);
}

TEST(GhBound, IdentityIsZero) {
  auto a = random_planar(24, 3);
  auto r = gh_distance(a, a);
  EXPECT_EQ(r.upper, 0.0);
  EXPECT_EQ(r.lower, 0.0);
}

TEST(GhBound, RecoversPermutation) {
  auto a = random_planar(12, 4);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin() + 1, perm.end(), std::mt19937_64(5));
  Mat d(12, 12);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) d(i, j) = a.distances(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  auto r = gh_distance(a, make_sample(d));
  EXPECT_LT(r.upper, 1e-12);
}

TEST(GhBound, RescaledIsPositiveAndDeterministic) {
  auto a = random_planar(10, 6);
  auto b = rescaled(a, 1.1);
  GhOptions opt;
  opt.seed = 42;
  auto r1 = gh_distance(a, b, opt);
  auto r2 = gh_distance(a, b, opt);
  EXPECT_GT(r1.upper, 0.0);
  EXPECT_EQ(r1.upper, r2.upper);
  // identity correspondence: distortion 0.1 * max distance
  EXPECT_LE(r1.upper, 0.5 * 0.1 * a.diameter() + 1e-12);
  EXPECT_LE(r1.lower, r1.upper);
}

TEST(GhBound, SymmetricAndBracketsExact) {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    auto a = random_planar(5, seed);
    auto b = random_planar(4, seed + 50);
    GhOptions opt;
    opt.seed = seed;
    auto ab = gh_distance(a, b, opt);
    auto ba = gh_distance(b, a, opt);
    EXPECT_EQ(ab.upper, ba.upper);
    EXPECT_EQ(ab.lower, ba.lower);
    double exact = gh_distance(a, b, {GhMode::exact}).upper;
    EXPECT_LE(ab.lower, exact + 1e-12);
    EXPECT_GE(ab.upper, exact - 1e-12);
  }
}

TEST(GhBound, Errors) {
  auto a = random_planar(4, 1);
  auto wide = rescaled(a, 10.0);
  EXPECT_THROW(gh_distance(a, wide), DomainError);
  PointedSample bad = a;
  bad.distances(0, 1) += 0.1;
  EXPECT_THROW(gh_distance(a, bad), DomainError);
  bad = a;
  bad.base = 9;
  EXPECT_THROW(gh_distance(a, bad), DomainError);
  EXPECT_THROW(gh_distance(a, make_sample(Mat::Zero(2, 3))), DimensionError);
}
