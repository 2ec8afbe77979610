#pragma once

// Metric and dilatation profiles, profile comparison, and the scaling actions
// on ensembles (transport, dilatation star, scalar dot).

#include "hens/cc_metric.hpp"
#include "hens/gh.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hens {

enum class ProfileKind { metric, dilatation };

inline const char* to_string(ProfileKind k) { return k == ProfileKind::metric ? "metric" : "dilatation"; }

/// Samples at strictly decreasing scales; each sample is a rescaled unit ball
/// pointed at its base.
struct ProfileCurve {
  ProfileKind kind = ProfileKind::metric;
  std::string algebra;
  std::vector<PointedSample> samples;
  /// Unscaled ball samples the profile was built from.
  std::vector<BallSample> raw;

  std::vector<double> scales() const {
    std::vector<double> out;
    for (const auto& s : samples) out.push_back(s.eps);
    return out;
  }
};

struct ProfileOptions {
  int samples = 24;
  std::uint64_t seed = 1;
  CcOptions cc = [] {
    CcOptions o;
    o.segments = 16;
    o.restarts = 2;
    return o;
  }();
  int witness_segments = 4;
};

namespace detail {

inline void check_scales(const std::vector<double>& eps) {
  if (eps.empty()) throw DomainError("profile: empty scale list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw DomainError("profile: scales must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw DomainError("profile: scales must be strictly decreasing");
  }
}

/// Witness points share `opt.seed` across scales; the optimizer seed changes
/// with the scale index.
inline BallSampleOptions ball_options(const ProfileOptions& opt, std::size_t scale_index) {
  BallSampleOptions b;
  b.count = opt.samples;
  b.point_seed = opt.seed;
  b.cc = opt.cc;
  b.cc.seed = derive_seed(opt.seed ^ opt.cc.seed, 1000 + scale_index);
  b.witness_segments = opt.witness_segments;
  return b;
}

inline PointedSample rescale_to_unit(const BallSample& b, double radius) {
  PointedSample s = b.sample;
  s.distances /= radius;
  s.eps = radius;
  return s;
}

}  // namespace detail

/// P^m(eps, x): the closed ball of radius eps about x with distances divided
/// by eps.
inline ProfileCurve metric_profile(const GradedAlgebra& alg, const Vec& x, const std::vector<double>& eps,
                                   const ProfileOptions& opt = {}) {
  detail::check_scales(eps);
  require_dim(x, alg.dim(), "metric_profile");
  ProfileCurve curve;
  curve.kind = ProfileKind::metric;
  curve.algebra = alg.name();
  PathModel model(alg, opt.cc.segments, opt.cc.ode_substeps);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    curve.raw.push_back(ball_sample(model, x, eps[k], detail::ball_options(opt, k)));
    curve.samples.push_back(detail::rescale_to_unit(curve.raw.back(), eps[k]));
  }
  return curve;
}

/// P(sigma)(eps): unit ball at the origin of sigma_eps = delta_eps^{-1} * sigma.
inline ProfileCurve dilatation_profile(const GradedAlgebra& alg, const std::vector<double>& eps,
                                       const ProfileOptions& opt = {}, double tol = kDefaultTolerance) {
  detail::check_scales(eps);
  auto rep = validate_ensemble(alg, Profile::homogeneous_ensemble, tol);
  if (!rep.passed()) {
    std::string failed;
    for (const auto& label : rep.failures()) failed += " " + label;
    throw ValidationError("dilatation_profile: " + alg.name() + " is not a homogeneous ensemble (failed:" + failed + ")");
  }
  ProfileCurve curve;
  curve.kind = ProfileKind::dilatation;
  curve.algebra = alg.name();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    GradedAlgebra sigma = deformed_algebra(alg, eps[k]);
    PathModel model(sigma, opt.cc.segments, opt.cc.ode_substeps);
    curve.raw.push_back(ball_sample(model, Vec::Zero(alg.dim()), 1.0, detail::ball_options(opt, k)));
    PointedSample s = curve.raw.back().sample;
    s.eps = eps[k];
    curve.samples.push_back(s);
  }
  return curve;
}

struct ProfileComparison {
  std::vector<double> scales;
  std::vector<double> upper;
  std::vector<double> lower;
  /// upper / scale.
  std::vector<double> ratio;
  /// Least-squares slope of log(ratio) against log(scale); positive when the
  /// ratio decays as the scale shrinks.
  double decay_exponent = 0.0;
  double noise_margin = 0.2;
  /// Largest endpoint residual among the compared samples.
  double solver_residual = 0.0;
  bool consistent = false;
  std::string verdict;
};

/// Finite-scale o(a) test: consistent when every bound vanishes or the ratio
/// bound/a shrinks over the ladder by more than the noise margin and never
/// grows by more than it between consecutive scales.
inline ProfileComparison profile_equivalence(const ProfileCurve& p1, const ProfileCurve& p2, const GhOptions& gh = {},
                                             double noise_margin = 0.2) {
  if (p1.samples.size() != p2.samples.size()) throw DomainError("profile_equivalence: different scale counts");
  ProfileComparison out;
  out.noise_margin = noise_margin;
  for (std::size_t k = 0; k < p1.samples.size(); ++k) {
    const double a = p1.samples[k].eps;
    if (std::abs(a - p2.samples[k].eps) > 1e-12 * a) {
      throw DomainError("profile_equivalence: scale mismatch at index " + std::to_string(k));
    }
    auto r = gh_distance(p1.samples[k], p2.samples[k], gh);
    out.scales.push_back(a);
    out.upper.push_back(r.upper);
    out.lower.push_back(r.lower);
    out.ratio.push_back(r.upper / a);
    out.solver_residual =
        std::max({out.solver_residual, p1.samples[k].solver_residual, p2.samples[k].solver_residual});
  }
  const std::size_t n = out.scales.size();
  double max_upper = 0.0;
  for (double u : out.upper) max_upper = std::max(max_upper, u);
  if (max_upper <= 1e-12) {
    out.consistent = true;
    out.decay_exponent = 0.0;
    out.verdict = "consistent with o(a): bounds vanish";
    return out;
  }
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double y = std::log(std::max(out.ratio[k], 1e-300));
      double x = std::log(out.scales[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    double den = m * sxx - sx * sx;
    out.decay_exponent = den != 0.0 ? (m * sxy - sx * sy) / den : 0.0;
  }
  bool monotone = true;
  for (std::size_t k = 1; k < n; ++k)
    if (out.ratio[k] > out.ratio[k - 1] * (1.0 + noise_margin)) monotone = false;
  const bool shrinks = n >= 2 && out.ratio.back() < out.ratio.front() * (1.0 - noise_margin);
  out.consistent = monotone && shrinks;
  out.verdict = out.consistent ? "consistent with o(a)" : "not consistent with o(a): ratio does not decay";
  return out;
}

// ---------------------------------------------------------------------------
// Actions on ensembles

/// F sigma = (F[F^{-1}., F^{-1}.], F delta F^{-1}, g(F^{-1}., F^{-1}.)).
/// F must be invertible and preserve the grade blocks.
inline GradedAlgebra transport(const GradedAlgebra& alg, const Mat& F, double tol = 1e-12) {
  const int n = alg.dim();
  require_square(F, n, "transport");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (alg.grade_index(i) != alg.grade_index(j) && std::abs(F(i, j)) > tol * std::max(1.0, max_abs(F))) {
        throw DomainError("transport: F mixes grade blocks");
      }
  Eigen::FullPivLU<Mat> lu(F);
  if (!lu.isInvertible()) throw DomainError("transport: F is singular");
  Mat finv = lu.inverse();
  std::vector<StructureEntry> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vec v = F * bracket(alg, finv.col(i), finv.col(j));
      for (int k = 0; k < n; ++k)
        if (v(k) != 0.0) out.push_back({i, j, k, v(k)});
    }
  }
  const int h = alg.horizontal_dim(), d0 = alg.d0_dim();
  Mat fh_inv = finv.topLeftCorner(h, h);
  Mat g = fh_inv.transpose() * alg.metric() * fh_inv;
  g = 0.5 * (g + g.transpose());
  std::vector<Mat> rep;
  if (alg.has_d0_rep()) {
    Mat f1 = F.block(d0, d0, alg.v1_dim(), alg.v1_dim());
    Mat f1_inv = finv.block(d0, d0, alg.v1_dim(), alg.v1_dim());
    Mat f0_inv = finv.topLeftCorner(d0, d0);
    for (int k = 0; k < d0; ++k) {
      Mat q = Mat::Zero(alg.v1_dim(), alg.v1_dim());
      for (int l = 0; l < d0; ++l) q += f0_inv(l, k) * alg.d0_rep()[static_cast<std::size_t>(l)];
      rep.push_back(f1 * q * f1_inv);
    }
  }
  return GradedAlgebra(alg.name(), alg.grades(), out, g, rep);
}

/// delta_eps^{-1} * sigma.
inline GradedAlgebra dilatation_star(const GradedAlgebra& alg, double eps) { return deformed_algebra(alg, eps); }

/// eps . sigma = ([.,.], delta, eps^2 g).
inline GradedAlgebra scalar_dot(const GradedAlgebra& alg, double eps) {
  require_positive_eps(eps, "scalar_dot");
  return alg.with_metric(eps * eps * alg.metric());
}

}  // namespace hens
