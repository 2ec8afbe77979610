#pragma once

// Carnot-Caratheodory (pseudo-)distance estimates: horizontal paths driven by
// piecewise-constant controls, penalty continuation with a final feasibility
// projection, the DL series, and pointed ball samples.

#include "hens/carnot.hpp"
#include "hens/gh.hpp"
#include "hens/parallel.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace hens {

// ---------------------------------------------------------------------------
// DL operator

struct DlResult {
  Mat value;
  int terms = 0;
  bool outside_convergence = false;
};

/// sum_{k>=0} ad_x^k / (k+1)!, stopped when ad_x^k vanishes or the term drops below 1e-14.
inline DlResult dl_operator(const GradedAlgebra& alg, const Vec& x) {
  require_dim(x, alg.dim(), "dl_operator");
  const int n = alg.dim();
  Mat ad = ad_matrix(alg, x);
  DlResult r;
  r.outside_convergence = ad.norm() >= 2.0 * std::numbers::pi;
  Mat power = Mat::Identity(n, n);
  r.value = Mat::Identity(n, n);
  r.terms = 1;
  double fact = 1.0;
  for (int k = 1; k < 200; ++k) {
    power = power * ad;
    fact *= (k + 1);
    double mag = max_abs(power) / fact;
    if (mag == 0.0) break;
    r.value += power / fact;
    ++r.terms;
    if (mag < 1e-14 * max_abs(r.value)) break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Paths

struct CcOptions {
  int segments = 32;
  int restarts = 8;
  std::uint64_t seed = 0;
  /// Target for the normalized endpoint residual after projection.
  double feasibility_tol = 1e-6;
  /// Energy weight on D0 controls; D0 motion has zero length, the weight only
  /// keeps the least-squares problem well posed.
  double d0_weight = 1e-3;
  int stage_iterations = 25;
  /// Initial penalty weight, multiplied by 10 for each of `stages` stages.
  double penalty = 100.0;
  int stages = 3;
  /// RK4 substeps per segment for non-nilpotent algebras.
  int ode_substeps = 2;
};

struct CcResult {
  double upper = 0.0;
  /// g-norm of the V1 projection of x^{-1}y; a lower bound when no bracket
  /// lands in V1, otherwise reported as 0.
  double lower_projection = 0.0;
  double endpoint_residual = 0.0;
  bool feasible = true;
  bool approximate_integration = false;
  std::string status = "ok";
  /// Controls (segments x horizontal_dim) of the best path.
  Mat controls;
};

/// Piecewise-constant horizontal controls on [0,1]; step k multiplies by
/// exp(u_k / N) on the right.
class PathModel {
 public:
  PathModel(const GradedAlgebra& alg, int segments, int ode_substeps = 2)
      : eng_(alg), n_(alg.dim()), h_(alg.horizontal_dim()), segments_(segments), substeps_(ode_substeps) {
    if (segments <= 0) throw DomainError("PathModel: segment count must be positive");
    if (h_ == 0) throw DimensionError("PathModel: empty horizontal block");
    g_ = alg.metric();
  }

  const GradedAlgebra& algebra() const { return eng_.algebra(); }
  const BchEngine& engine() const { return eng_; }
  int segments() const { return segments_; }
  int horizontal_dim() const { return h_; }

  Vec embed(const Vec& u) const {
    Vec out = Vec::Zero(n_);
    out.head(h_) = u;
    return out;
  }

  Vec step(const Vec& x, const Vec& u) const {
    return eng_.product<double>(x, Vec(embed(u) / static_cast<double>(segments_)), substeps_);
  }

  Vec endpoint(const Mat& controls, const Vec& start) const {
    check_controls(controls);
    Vec x = start;
    for (int k = 0; k < segments_; ++k) x = step(x, controls.row(k).transpose());
    return x;
  }

  /// Endpoint from the origin and its Jacobian with respect to the row-major
  /// flattened controls.
  void endpoint_jacobian(const Mat& controls, Vec* end, Mat* jac) const {
    check_controls(controls);
    if (n_ + h_ <= kInlineDerivatives) {
      jacobian_impl<Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kInlineDerivatives, 1>>(controls, end, jac);
    } else {
      jacobian_impl<Vec>(controls, end, jac);
    }
  }

  /// sum_k (1/N) sqrt(g(u_k, u_k)); g vanishes on D0.
  double length(const Mat& controls) const {
    check_controls(controls);
    double l = 0.0;
    for (int k = 0; k < segments_; ++k) {
      Vec u = controls.row(k).transpose();
      l += std::sqrt(std::max(0.0, u.dot(g_ * u))) / segments_;
    }
    return l;
  }

 private:
  static constexpr int kInlineDerivatives = 24;

  /// Per-step Jacobians by forward-mode AD, accumulated backwards.
  template <class D>
  void jacobian_impl(const Mat& controls, Vec* end, Mat* jac) const {
    using AD = Eigen::AutoDiffScalar<D>;
    const int nd = n_ + h_;
    std::vector<Mat> a_mats(static_cast<std::size_t>(segments_)), b_mats(static_cast<std::size_t>(segments_));
    Vec x = Vec::Zero(n_);
    for (int k = 0; k < segments_; ++k) {
      VecT<AD> xa(n_), ya(n_);
      for (int i = 0; i < n_; ++i) xa(i) = AD(x(i), nd, i);
      for (int i = 0; i < n_; ++i) ya(i) = AD(0.0, D::Zero(nd));
      for (int a = 0; a < h_; ++a) {
        ya(a) = AD(controls(k, a) / segments_, D(D::Unit(nd, n_ + a) / segments_));
      }
      VecT<AD> next = eng_.product<AD>(xa, ya, substeps_);
      Mat& am = a_mats[static_cast<std::size_t>(k)];
      Mat& bm = b_mats[static_cast<std::size_t>(k)];
      am.resize(n_, n_);
      bm.resize(n_, h_);
      for (int i = 0; i < n_; ++i) {
        x(i) = next(i).value();
        const D& d = next(i).derivatives();
        for (int j = 0; j < n_; ++j) am(i, j) = d.size() ? d(j) : 0.0;
        for (int j = 0; j < h_; ++j) bm(i, j) = d.size() ? d(n_ + j) : 0.0;
      }
    }
    *end = x;
    jac->resize(n_, segments_ * h_);
    Mat m = Mat::Identity(n_, n_);
    for (int k = segments_ - 1; k >= 0; --k) {
      jac->block(0, k * h_, n_, h_) = m * b_mats[static_cast<std::size_t>(k)];
      m = m * a_mats[static_cast<std::size_t>(k)];
    }
  }

  void check_controls(const Mat& c) const {
    if (c.rows() != segments_ || c.cols() != h_) {
      throw DimensionError("path controls must be " + std::to_string(segments_) + "x" + std::to_string(h_));
    }
  }

  BchEngine eng_;
  int n_, h_, segments_, substeps_;
  Mat g_;
};

/// Homogeneous size max_i |z_i|^{1/deg i}.
inline double homogeneous_norm(const GradedAlgebra& alg, const Vec& z) {
  double s = 0.0;
  for (int i = 0; i < alg.dim(); ++i) s = std::max(s, std::pow(std::abs(z(i)), 1.0 / alg.degree(i)));
  return s;
}

/// Reverse of a path: controls negated in reverse order.
inline Mat reverse_controls(const Mat& c) { return -c.colwise().reverse(); }

/// Concatenation on [0,1]: the result has rows(a)+rows(b) segments, controls
/// rescaled so each half keeps its displacement.
inline Mat concat_controls(const Mat& a, const Mat& b) {
  Mat out(a.rows() + b.rows(), a.cols());
  const double ta = static_cast<double>(a.rows()), tb = static_cast<double>(b.rows());
  const double total = ta + tb;
  out.topRows(a.rows()) = a * (total / ta);
  out.bottomRows(b.rows()) = b * (total / tb);
  return out;
}

/// Resample piecewise-constant controls onto `segments` uniform segments
/// (exact when `segments` is a multiple of the input count).
inline Mat resample_controls(const Mat& c, int segments) {
  Mat out(segments, c.cols());
  for (int k = 0; k < segments; ++k) {
    double t = (k + 0.5) / segments;
    int src = std::min(static_cast<int>(t * c.rows()), static_cast<int>(c.rows()) - 1);
    out.row(k) = c.row(src);
  }
  return out;
}

namespace detail {

struct Normalized {
  Vec target;    // z
  double scale;  // s
  Vec inv_weights;  // 1 / s^{deg i}
};

class CcSolver {
 public:
  CcSolver(const PathModel& model, const CcOptions& opt, const Normalized& nz)
      : model_(model), opt_(opt), nz_(nz), n_(model.algebra().dim()), h_(model.horizontal_dim()),
        N_(model.segments()) {
    const auto& alg = model.algebra();
    Mat gw = alg.metric();
    for (int a = 0; a < alg.d0_dim(); ++a) gw(a, a) += opt.d0_weight;
    if (!(min_eigenvalue(gw) > 0.0)) throw DomainError("cc_distance: metric is not positive definite on D");
    energy_.resize(N_ * h_, N_ * h_);
    energy_.setZero();
    for (int k = 0; k < N_; ++k) energy_.block(k * h_, k * h_, h_, h_) = gw / N_;
  }

  /// Normalized endpoint residual and its Jacobian in normalized controls.
  void residual(const Vec& v, Vec* r, Mat* jr) const {
    Mat u = to_mat(v) * nz_.scale;
    Vec end;
    Mat jx;
    model_.endpoint_jacobian(u, &end, &jx);
    *r = (end - nz_.target).cwiseProduct(nz_.inv_weights);
    *jr = nz_.inv_weights.asDiagonal() * jx * nz_.scale;
  }

  double objective(const Vec& v, const Vec& r, double mu) const {
    return 0.5 * v.dot(energy_ * v) + 0.5 * mu * r.squaredNorm();
  }

  /// Levenberg-Marquardt over one penalty stage.
  void minimize_stage(Vec& v, double mu) const {
    Vec r;
    Mat jr;
    residual(v, &r, &jr);
    double f = objective(v, r, mu);
    double lambda = 1e-3;
    for (int it = 0; it < opt_.stage_iterations; ++it) {
      Mat hess = energy_ + mu * jr.transpose() * jr;
      Vec grad = energy_ * v + mu * jr.transpose() * r;
      bool accepted = false;
      for (int tries = 0; tries < 12; ++tries) {
        Mat damped = hess;
        damped.diagonal().array() += lambda * (1.0 + hess.diagonal().array());
        Vec step = -damped.ldlt().solve(grad);
        Vec vt = v + step;
        Vec rt;
        Mat jt;
        residual(vt, &rt, &jt);
        double ft = objective(vt, rt, mu);
        if (std::isfinite(ft) && ft < f) {
          double rel = (f - ft) / std::max(f, 1e-300);
          v = vt;
          r = rt;
          jr = jt;
          f = ft;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          if (rel < 1e-12) return;
          break;
        }
        lambda *= 10.0;
      }
      if (!accepted) return;
    }
  }

  /// Minimum-norm Gauss-Newton steps onto the endpoint constraint.
  double project(Vec& v) const {
    Vec r;
    Mat jr;
    residual(v, &r, &jr);
    double res = max_abs(r);
    for (int it = 0; it < 30 && res > 1e-13; ++it) {
      Mat jjt = jr * jr.transpose();
      jjt.diagonal().array() += 1e-14 * (1.0 + jjt.diagonal().maxCoeff());
      Vec step = -jr.transpose() * jjt.ldlt().solve(r);
      double t = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 20; ++ls, t *= 0.5) {
        Vec vt = v + t * step;
        Vec rt;
        Mat jt;
        residual(vt, &rt, &jt);
        double rest = max_abs(rt);
        if (std::isfinite(rest) && rest < res) {
          v = vt;
          r = rt;
          jr = jt;
          res = rest;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    return res;
  }

  Mat to_mat(const Vec& v) const {
    Mat m(N_, h_);
    for (int k = 0; k < N_; ++k)
      for (int a = 0; a < h_; ++a) m(k, a) = v(k * h_ + a);
    return m;
  }

  Vec to_vec(const Mat& m) const {
    Vec v(N_ * h_);
    for (int k = 0; k < N_; ++k)
      for (int a = 0; a < h_; ++a) v(k * h_ + a) = m(k, a);
    return v;
  }

  const Normalized& normalized() const { return nz_; }

 private:
  const PathModel& model_;
  const CcOptions& opt_;
  Normalized nz_;
  int n_, h_, N_;
  Mat energy_;
};

inline bool brackets_avoid_v1(const GradedAlgebra& alg) {
  for (const auto& e : alg.structure())
    if (alg.grade_index(e.k) == 1) return false;
  return true;
}

}  // namespace detail

/// Upper bound on d(x, y) by multi-start optimization of N-segment horizontal
/// paths from the origin to x^{-1}y. `warm_starts` are extra initial control
/// matrices (any segment count; resampled) tried before the random restarts.
inline CcResult cc_distance(const PathModel& model, const Vec& x, const Vec& y, const CcOptions& opt = {},
                            const std::vector<Mat>& warm_starts = {}) {
  const auto& alg = model.algebra();
  require_dim(x, alg.dim(), "cc_distance");
  require_dim(y, alg.dim(), "cc_distance");
  if (opt.restarts < 0) throw DomainError("cc_distance: negative restart count");
  if (model.segments() != opt.segments) throw DomainError("cc_distance: segment count differs from the path model");
  CcResult out;
  out.approximate_integration = !model.engine().nilpotent();
  const int h = model.horizontal_dim(), N = model.segments(), n = alg.dim();
  const Vec z = model.engine().product(group_inverse(x), y);

  if (detail::brackets_avoid_v1(alg)) {
    Vec d = z.segment(alg.layer_offset(1), alg.v1_dim());
    out.lower_projection = std::sqrt(std::max(0.0, d.dot(alg.v1_metric() * d)));
  }
  const double s = homogeneous_norm(alg, z);
  out.controls = Mat::Zero(N, h);
  if (s == 0.0) return out;

  detail::Normalized nz{z, s, Vec(n)};
  for (int i = 0; i < n; ++i) nz.inv_weights(i) = std::pow(s, -alg.degree(i));
  detail::CcSolver solver(model, opt, nz);

  std::vector<Mat> starts;
  for (const auto& w : warm_starts) {
    if (w.cols() != h) throw DimensionError("cc_distance: warm start has the wrong control width");
    starts.push_back(resample_controls(w, N) / s);
  }
  const std::size_t total = starts.size() + static_cast<std::size_t>(opt.restarts);
  struct Attempt {
    double length = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    Mat controls;
  };
  std::vector<Attempt> attempts(total);
  const double two_pi = 2.0 * std::numbers::pi;

  parallel_for(total, [&](std::size_t idx) {
    Mat v0;
    if (idx < starts.size()) {
      v0 = starts[idx];
    } else {
      std::mt19937_64 rng(derive_seed(opt.seed, idx - starts.size()));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vec a(h), b(h), c(h);
      for (int i = 0; i < h; ++i) {
        a(i) = gauss(rng);
        b(i) = gauss(rng);
        c(i) = gauss(rng);
      }
      if (idx == starts.size()) a = 0.1 * a + z.head(h) / s;  // near the straight segment
      v0.resize(N, h);
      for (int k = 0; k < N; ++k) {
        double t = two_pi * (k + 0.5) / N;
        v0.row(k) = (a + b * std::cos(t) + c * std::sin(t)).transpose();
      }
    }
    Vec v = solver.to_vec(v0);
    double mu = opt.penalty;
    for (int stage = 0; stage < opt.stages; ++stage, mu *= 10.0) solver.minimize_stage(v, mu);
    double res = solver.project(v);
    Attempt& at = attempts[idx];
    at.residual = res;
    at.controls = solver.to_mat(v) * s;
    at.length = model.length(at.controls);
  });

  const Attempt* best = nullptr;
  const Attempt* least_residual = nullptr;
  for (const auto& at : attempts) {
    if (!least_residual || at.residual < least_residual->residual) least_residual = &at;
    if (at.residual <= opt.feasibility_tol && (!best || at.length < best->length)) best = &at;
  }
  if (!best) {
    if (!least_residual) {
      out.feasible = false;
      out.status = "no attempts";
      out.upper = std::numeric_limits<double>::infinity();
      return out;
    }
    best = least_residual;
    out.feasible = false;
    out.status = "endpoint-infeasible: normalized residual " + std::to_string(best->residual);
  }
  out.controls = best->controls;
  out.upper = best->length;
  Vec end = model.endpoint(best->controls, Vec::Zero(n));
  out.endpoint_residual = max_abs(Vec(end - z));
  return out;
}

inline CcResult cc_distance(const GradedAlgebra& alg, const Vec& x, const Vec& y, const CcOptions& opt = {}) {
  PathModel model(alg, opt.segments, opt.ode_substeps);
  return cc_distance(model, x, y, opt);
}

// ---------------------------------------------------------------------------
// Pointed ball samples

struct BallSampleOptions {
  int count = 16;
  std::uint64_t point_seed = 1;
  CcOptions cc;
  /// Segments of the random witness paths that generate the points.
  int witness_segments = 4;
};

struct BallSample {
  PointedSample sample;
  std::vector<Vec> points;
  /// Witness path controls (witness_segments x horizontal_dim) and lengths.
  std::vector<Mat> witnesses;
  std::vector<double> witness_lengths;
};

/// Random witness controls for the unit ball; scaled by the radius later.
inline std::vector<Mat> unit_witnesses(const GradedAlgebra& alg, int count, int segments, std::uint64_t seed) {
  const int h = alg.horizontal_dim(), d0 = alg.d0_dim(), p = alg.v1_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::LLT<Mat> llt(alg.v1_metric());
  Mat l_inv_t = Mat(llt.matrixU()).inverse();  // maps Euclidean unit vectors to g-unit vectors
  std::vector<Mat> out;
  for (int i = 0; i < count; ++i) {
    double total = std::cbrt(unif(rng));
    Vec parts(segments);
    for (int k = 0; k < segments; ++k) parts(k) = -std::log(1.0 - unif(rng) + 1e-300);
    parts *= total / parts.sum();
    Mat c(segments, h);
    for (int k = 0; k < segments; ++k) {
      Vec dir(p);
      for (int a = 0; a < p; ++a) dir(a) = gauss(rng);
      dir.normalize();
      Vec u = Vec::Zero(h);
      for (int a = 0; a < d0; ++a) u(a) = gauss(rng);
      u.tail(p) = l_inv_t * dir;
      // segment k lasts 1/segments and has length parts(k)
      c.row(k) = (u * parts(k) * segments).transpose();
    }
    out.push_back(c);
  }
  return out;
}

/// n points of the closed ball B(center, radius): the center (base point)
/// and endpoints of random horizontal witness paths of length <= radius.
/// Distances are optimized upper bounds, capped by the concatenated witness
/// length, so the matrix diameter never exceeds 2 * radius.
inline BallSample ball_sample(const PathModel& model, const Vec& center, double radius,
                              const BallSampleOptions& opt) {
  const auto& alg = model.algebra();
  require_dim(center, alg.dim(), "ball_sample");
  if (opt.count < 2) throw DomainError("ball_sample: need at least two points");
  if (radius < 0.0 || !std::isfinite(radius)) throw DomainError("ball_sample: radius must be nonnegative");
  const int n = opt.count;
  BallSample out;
  out.sample.base = 0;
  out.sample.distances = Mat::Zero(n, n);
  if (radius == 0.0) {
    out.points.assign(static_cast<std::size_t>(n), center);
    out.witnesses.assign(static_cast<std::size_t>(n), Mat::Zero(opt.witness_segments, model.horizontal_dim()));
    out.witness_lengths.assign(static_cast<std::size_t>(n), 0.0);
    return out;
  }
  PathModel witness_model(alg, opt.witness_segments);
  auto unit = unit_witnesses(alg, n - 1, opt.witness_segments, opt.point_seed);
  out.points.push_back(center);
  out.witnesses.push_back(Mat::Zero(opt.witness_segments, model.horizontal_dim()));
  out.witness_lengths.push_back(0.0);
  for (const auto& w : unit) {
    Mat c = w * radius;
    out.witnesses.push_back(c);
    out.witness_lengths.push_back(witness_model.length(c));
    out.points.push_back(witness_model.engine().product(center, witness_model.endpoint(c, Vec::Zero(alg.dim()))));
  }
  struct Pair {
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::vector<double> dist(pairs.size()), resid(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t idx) {
    const auto [i, j] = pairs[idx];
    const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
    double cap = out.witness_lengths[si] + out.witness_lengths[sj];
    CcOptions cc = opt.cc;
    cc.seed = derive_seed(opt.cc.seed, idx);
    Mat warm = concat_controls(reverse_controls(out.witnesses[si]), out.witnesses[sj]);
    CcResult r = cc_distance(model, out.points[si], out.points[sj], cc, {warm});
    double d = r.feasible ? std::min(r.upper, cap) : cap;
    dist[idx] = d;
    resid[idx] = r.feasible ? r.endpoint_residual : 0.0;
  });
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto [i, j] = pairs[idx];
    out.sample.distances(i, j) = out.sample.distances(j, i) = dist[idx];
    out.sample.solver_residual = std::max(out.sample.solver_residual, resid[idx]);
  }
  return out;
}

inline BallSample ball_sample(const GradedAlgebra& alg, const Vec& center, double radius,
                              const BallSampleOptions& opt) {
  PathModel model(alg, opt.cc.segments, opt.cc.ode_substeps);
  return ball_sample(model, center, radius, opt);
}

}  // namespace hens
