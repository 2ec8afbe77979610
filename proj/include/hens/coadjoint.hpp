#pragma once

// W_eps matrix polynomials, the bunch of an ensemble, the symmetry group
// G(sigma), the coadjoint relation and the prequantization operator.

#include "hens/algebra.hpp"
#include "hens/normal_frame.hpp"
#include "hens/parallel.hpp"
#include "hens/polynomial.hpp"

#include <Eigen/Cholesky>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hens {

/// Inner product gbar on the whole algebra.
struct ExtendedMetric {
  Mat matrix;
  /// True when the normal frame could not be built and the higher layers got
  /// the identity completion instead.
  bool frame_fallback = false;
  std::string note;
};

/// Leaf metric on V1, product rule along a normal frame of the graded part
/// for V2..Vm, and -1/2 tr(Q(u)Q(v)) on D0.
inline ExtendedMetric extended_metric(const GradedAlgebra& alg) {
  const int n = alg.dim(), d0 = alg.d0_dim(), v1 = alg.v1_dim();
  if (v1 == 0) throw DomainError("extended_metric: " + alg.name() + " has no V1 layer");
  ExtendedMetric out;
  out.matrix = Mat::Zero(n, n);
  if (d0 > 0) {
    if (!alg.has_d0_rep()) throw DomainError("extended_metric: " + alg.name() + " has D0 but no d0_rep");
    for (int a = 0; a < d0; ++a)
      for (int b = 0; b < d0; ++b) {
        const auto& qa = alg.d0_rep()[static_cast<std::size_t>(a)];
        const auto& qb = alg.d0_rep()[static_cast<std::size_t>(b)];
        out.matrix(a, b) = -0.5 * (qa * qb).trace();
      }
    if (!(min_eigenvalue(out.matrix.topLeftCorner(d0, d0)) > 1e-12)) {
      throw DomainError("extended_metric: d0_rep is not faithful, the trace form on D0 is degenerate");
    }
  }
  const Mat g1 = alg.v1_metric();
  const int rest = n - d0;
  if (rest == v1) {
    out.matrix.bottomRightCorner(v1, v1) = g1;
    return out;
  }
  // graded part on V1 + ... + Vm in local coordinates
  std::vector<Grade> grades(alg.grades().begin() + (d0 > 0 ? 1 : 0), alg.grades().end());
  std::vector<StructureEntry> graded;
  for (const auto& e : alg.structure()) {
    if (e.i < d0 || e.j < d0 || e.k < d0) continue;
    if (deformation_exponent(alg, e.i, e.j, e.k) != 0) continue;
    graded.push_back({e.i - d0, e.j - d0, e.k - d0, e.value});
  }
  try {
    GradedAlgebra part(alg.name() + "_graded", grades, graded, g1);
    std::vector<Vec> gens;
    for (int i = 0; i < v1; ++i) gens.push_back(Vec::Unit(rest, i));
    auto tree = build_normal_frame(part, gens);
    out.matrix.bottomRightCorner(rest, rest) = frame_metric_in_ambient(tree, extend_metric(tree, g1));
  } catch (const std::exception& e) {
    out.frame_fallback = true;
    out.note = e.what();
    out.matrix.bottomRightCorner(rest, rest) = Mat::Identity(rest, rest);
    out.matrix.block(d0, d0, v1, v1) = g1;
  }
  return out;
}

/// Polynomial in eps with matrix coefficients; coeffs[k] multiplies eps^k.
struct EpsMatrixPolynomial {
  std::vector<Mat> coeffs;

  int degree() const {
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
      if (!coeffs[static_cast<std::size_t>(k)].isZero(0.0)) return k;
    return -1;
  }
  bool is_zero() const { return degree() < 0; }
  Mat evaluate(double eps) const {
    if (coeffs.empty()) return Mat();
    Mat out = Mat::Zero(coeffs[0].rows(), coeffs[0].cols());
    double p = 1.0;
    for (const auto& c : coeffs) {
      out += p * c;
      p *= eps;
    }
    return out;
  }
};

namespace detail {

inline int max_exponent(const GradedAlgebra& alg) {
  int k = 0;
  for (const auto& e : alg.structure()) {
    int x = deformation_exponent(alg, e.i, e.j, e.k);
    if (x < 0) {
      throw ValidationError("w_polynomial: bracket entry [e" + std::to_string(e.i) + ", e" + std::to_string(e.j) +
                            "] -> e" + std::to_string(e.k) + " has negative eps exponent");
    }
    k = std::max(k, x);
  }
  return k;
}

/// ad(x) restricted to the entries of exponent `power` (all entries if power < 0).
inline Mat ad_matrix(const GradedAlgebra& alg, const std::vector<StructureEntry>& entries, const Vec& x,
                     int power) {
  Mat ad = Mat::Zero(alg.dim(), alg.dim());
  for (const auto& e : entries) {
    if (power >= 0 && deformation_exponent(alg, e.i, e.j, e.k) != power) continue;
    ad(e.k, e.j) += x(e.i) * e.value;
    ad(e.k, e.i) -= x(e.j) * e.value;
  }
  return ad;
}

/// W with gbar(u, ad y) = gbar(W u, y): W = Gbar^{-1} ad^T Gbar.
inline Mat w_from_ad(const Mat& ad, const Mat& gbar, const Eigen::LDLT<Mat>& gbar_ldlt) {
  return gbar_ldlt.solve(Mat(ad.transpose() * gbar));
}

}  // namespace detail

/// W_eps(x) for the deformed bracket with respect to `gbar`.
inline EpsMatrixPolynomial w_polynomial(const GradedAlgebra& alg, const Mat& gbar, const Vec& x) {
  require_dim(x, alg.dim(), "w_polynomial");
  require_square(gbar, alg.dim(), "w_polynomial");
  const int top = detail::max_exponent(alg);
  const int m = std::max(1, alg.step());
  if (top > 2 * m - 1) throw ValidationError("w_polynomial: eps degree exceeds 2m-1");
  Eigen::LDLT<Mat> ldlt(gbar);
  EpsMatrixPolynomial w;
  for (int k = 0; k <= top; ++k)
    w.coeffs.push_back(detail::w_from_ad(detail::ad_matrix(alg, alg.structure(), x, k), gbar, ldlt));
  return w;
}

inline EpsMatrixPolynomial w_polynomial(const GradedAlgebra& alg, const Vec& x) {
  return w_polynomial(alg, extended_metric(alg).matrix, x);
}

/// Bunch element [[W_eps(u), 0], [u^T, 0]] split by eps power (u sits in the
/// eps^0 block).
inline std::vector<Mat> bunch_element(const GradedAlgebra& alg, const Mat& gbar, const Vec& u) {
  auto w = w_polynomial(alg, gbar, u);
  const int n = alg.dim();
  std::vector<Mat> out;
  for (std::size_t k = 0; k < w.coeffs.size(); ++k) {
    Mat b = Mat::Zero(n + 1, n + 1);
    b.topLeftCorner(n, n) = w.coeffs[k];
    if (k == 0) b.block(n, 0, 1, n) = u.transpose();
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// G(sigma)

struct SymmetryCandidate {
  Mat F;
  /// (a) F keeps every V0 + ... + Vk.
  double filtration = 0.0;
  /// (b) F fixes D0 pointwise.
  double fixes_d0 = 0.0;
  /// (c) F commutes with Q on V1 and keeps V1 off D0.
  double commutes_q = 0.0;
  /// (d) F restricted to V1 is a g-isometry.
  double isometry = 0.0;
  double tolerance = 0.0;
  bool member = false;

  std::array<double, 4> residuals() const { return {filtration, fixes_d0, commutes_q, isometry}; }
};

inline SymmetryCandidate in_symmetry_group(const GradedAlgebra& alg, const Mat& F, double tol = 1e-10) {
  const int n = alg.dim(), d0 = alg.d0_dim(), v1 = alg.v1_dim();
  require_square(F, n, "in_symmetry_group");
  Eigen::FullPivLU<Mat> lu(F);
  if (!lu.isInvertible()) throw DomainError("in_symmetry_group: F is singular");
  SymmetryCandidate s;
  s.F = F;
  for (int j = 0; j < n; ++j)
    for (int r = 0; r < n; ++r)
      if (alg.grade_index(r) > alg.grade_index(j)) s.filtration = std::max(s.filtration, std::abs(F(r, j)));
  const Mat f11 = F.block(d0, d0, v1, v1);
  if (d0 > 0) {
    s.fixes_d0 = max_abs(Mat(F.leftCols(d0) - Mat::Identity(n, n).leftCols(d0)));
    s.commutes_q = max_abs(Mat(F.block(0, d0, d0, v1)));
    for (const auto& q : alg.d0_rep()) s.commutes_q = std::max(s.commutes_q, max_abs(Mat(f11 * q - q * f11)));
  }
  const Mat g1 = alg.v1_metric();
  s.isometry = max_abs(Mat(f11.transpose() * g1 * f11 - g1));
  s.tolerance = tol * std::max(1.0, max_abs(F));
  s.member = s.filtration <= s.tolerance && s.fixes_d0 <= s.tolerance && s.commutes_q <= s.tolerance &&
             s.isometry <= s.tolerance;
  return s;
}

/// Linearized membership: f kills D0, keeps the filtration and V1, commutes
/// with Q and is g-skew on V1. Largest violation.
inline double symmetry_algebra_residual(const GradedAlgebra& alg, const Mat& f) {
  const int n = alg.dim(), d0 = alg.d0_dim(), v1 = alg.v1_dim();
  require_square(f, n, "symmetry_algebra_residual");
  double r = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (alg.grade_index(i) > alg.grade_index(j)) r = std::max(r, std::abs(f(i, j)));
  const Mat f11 = f.block(d0, d0, v1, v1);
  if (d0 > 0) {
    r = std::max(r, max_abs(Mat(f.leftCols(d0))));
    r = std::max(r, max_abs(Mat(f.block(0, d0, d0, v1))));
    for (const auto& q : alg.d0_rep()) r = std::max(r, max_abs(Mat(f11 * q - q * f11)));
  }
  const Mat g1 = alg.v1_metric();
  return std::max(r, max_abs(Mat(f11.transpose() * g1 + g1 * f11)));
}

namespace detail {

/// Basis of g-skew matrices on V1 commuting with every Q, as V1 blocks.
inline std::vector<Mat> v1_symmetry_basis(const GradedAlgebra& alg) {
  const int p = alg.v1_dim();
  Eigen::LLT<Mat> llt(alg.v1_metric());
  const Mat lt = llt.matrixU();  // g1 = lt^T lt
  const Mat lt_inv = lt.inverse();
  std::vector<Mat> skew;
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      Mat s = Mat::Zero(p, p);
      s(a, b) = 1.0;
      s(b, a) = -1.0;
      skew.push_back(s);
    }
  if (skew.empty()) return {};
  std::vector<Mat> qhat;
  for (const auto& q : alg.d0_rep()) qhat.push_back(lt * q * lt_inv);
  Mat sys = Mat::Zero(static_cast<Eigen::Index>(qhat.size()) * p * p, static_cast<Eigen::Index>(skew.size()));
  for (std::size_t c = 0; c < skew.size(); ++c)
    for (std::size_t l = 0; l < qhat.size(); ++l) {
      Mat comm = skew[c] * qhat[l] - qhat[l] * skew[c];
      sys.block(static_cast<Eigen::Index>(l) * p * p, static_cast<Eigen::Index>(c), p * p, 1) =
          Eigen::Map<const Vec>(comm.data(), p * p);
    }
  Mat kernel;
  if (qhat.empty()) {
    kernel = Mat::Identity(static_cast<Eigen::Index>(skew.size()), static_cast<Eigen::Index>(skew.size()));
  } else {
    Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * std::max(1.0, sv(0))) ++rank;
    kernel = svd.matrixV().rightCols(svd.matrixV().cols() - rank);
  }
  std::vector<Mat> out;
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    Mat s = Mat::Zero(p, p);
    for (std::size_t b = 0; b < skew.size(); ++b) s += kernel(static_cast<Eigen::Index>(b), c) * skew[b];
    out.push_back(lt_inv * s * lt);
  }
  return out;
}

}  // namespace detail

/// Random element of G(sigma): identity on D0, exp of a random element of the
/// V1 commutant, and random invertible filtration-preserving columns on
/// V2..Vm with up to `spread` off-diagonal weight.
inline Mat sample_member(const GradedAlgebra& alg, std::uint64_t seed, double spread = 0.5) {
  const int n = alg.dim(), d0 = alg.d0_dim(), v1 = alg.v1_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat F = Mat::Identity(n, n);
  Mat a = Mat::Zero(v1, v1);
  for (const auto& b : detail::v1_symmetry_basis(alg)) a += normal(rng) * b;
  F.block(d0, d0, v1, v1) = a.exp();
  for (int j = d0 + v1; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (alg.grade_index(i) > alg.grade_index(j)) continue;
      if (i == j) {
        F(i, j) = 1.0 + 0.5 * std::tanh(normal(rng));
      } else {
        F(i, j) = spread * normal(rng) / std::sqrt(static_cast<double>(n));
      }
    }
  return F;
}

/// Ad*_{F~} B(sigma) against B(F sigma) for every basis u and eps power, in
/// gbar-orthonormal coordinates. F~ = [[F^T, 0], [0, 1]] acts on the bunch by
/// xi -> F~^{-1} xi F~. The right side is built from the F-transported
/// bracket with gbar held fixed. Returns the largest entry mismatch.
inline double coadjoint_check(const GradedAlgebra& alg, const Mat& F, double tol = 1e-10) {
  auto cand = in_symmetry_group(alg, F, tol);
  if (!cand.member) throw DomainError("coadjoint_check: F is not in G(sigma)");
  const int n = alg.dim();
  const Mat gbar = extended_metric(alg).matrix;
  Eigen::LLT<Mat> llt(gbar);
  const Mat t = Mat(llt.matrixU());  // gbar = t^T t, hat coordinates x^ = t x
  const Mat t_inv = t.inverse();
  const Mat f_inv = F.fullPivLu().inverse();
  const Mat fhat = t * F * t_inv;
  Mat ftilde = Mat::Identity(n + 1, n + 1);
  ftilde.topLeftCorner(n, n) = fhat.transpose();
  const Mat ftilde_inv = ftilde.fullPivLu().inverse();

  // transported bracket, one eps power at a time
  const int top = detail::max_exponent(alg);
  std::vector<std::vector<StructureEntry>> moved(static_cast<std::size_t>(top + 1));
  for (int k = 0; k <= top; ++k) {
    std::vector<StructureEntry> part;
    for (const auto& e : alg.structure())
      if (deformation_exponent(alg, e.i, e.j, e.k) == k) part.push_back(e);
    GradedAlgebra piece = alg.with_structure(part);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Vec v = F * bracket(piece, Vec(f_inv.col(i)), Vec(f_inv.col(j)));
        for (int l = 0; l < n; ++l)
          if (v(l) != 0.0) moved[static_cast<std::size_t>(k)].push_back({i, j, l, v(l)});
      }
  }
  auto to_hat = [&](const Mat& b) {
    Mat out = b;
    out.topLeftCorner(n, n) = t * b.topLeftCorner(n, n) * t_inv;
    out.block(n, 0, 1, n) = b.block(n, 0, 1, n) * t_inv;
    return out;
  };
  Eigen::LDLT<Mat> ldlt(gbar);
  double worst = 0.0;
  for (int b = 0; b < n; ++b) {
    const Vec u = Vec::Unit(n, b);
    const auto lhs = bunch_element(alg, gbar, u);
    const Vec fu = F * u;
    for (int k = 0; k <= top; ++k) {
      Mat left = ftilde_inv * to_hat(lhs[static_cast<std::size_t>(k)]) * ftilde;
      Mat right = Mat::Zero(n + 1, n + 1);
      right.topLeftCorner(n, n) =
          detail::w_from_ad(detail::ad_matrix(alg, moved[static_cast<std::size_t>(k)], fu, -1), gbar, ldlt);
      if (k == 0) right.block(n, 0, 1, n) = fu.transpose();
      worst = std::max(worst, max_abs(Mat(left - to_hat(right))));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Moment map and prequantization

/// (A, B) = tr(A B^T).
inline double trace_pairing(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

/// <J(W, u), f> = (W, f).
inline double moment_map(const Mat& w, const Mat& f) { return trace_pairing(w, f); }

struct PrequantOptions {
  unsigned degree_bound = 2;
  /// Reject f outside Lie G(sigma) beyond this residual; negative disables.
  double algebra_tol = 1e-9;
};

/// Variable layout for h: W entries row-major (index a*n + b), then u.
inline std::size_t prequant_variable_count(int n) { return static_cast<std::size_t>(n) * n + n; }

/// Q(f)h at (W, u) as (real, imaginary):
/// (i/2pi){(dh/dW, [W, f]) + (dh/du, f u)} + (W, f) h.
inline std::pair<double, double> prequant_apply(const Mat& f, const Polynomial<double>& h, const Mat& w,
                                                const Vec& u, unsigned degree_bound = 2) {
  const int n = static_cast<int>(f.rows());
  require_square(f, n, "prequant_apply");
  require_square(w, n, "prequant_apply");
  require_dim(u, n, "prequant_apply");
  if (h.total_degree() > degree_bound) {
    throw DomainError("prequant_apply: h has degree " + std::to_string(h.total_degree()) + " above the bound " +
                      std::to_string(degree_bound));
  }
  if (h.width() > prequant_variable_count(n)) throw DimensionError("prequant_apply: h uses too many variables");
  std::vector<double> point(prequant_variable_count(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) point[static_cast<std::size_t>(a * n + b)] = w(a, b);
  for (int k = 0; k < n; ++k) point[static_cast<std::size_t>(n * n + k)] = u(k);
  const Mat comm = w * f - f * w;
  const Vec fu = f * u;
  double flow = 0.0;
  for (std::size_t v = 0; v < h.width(); ++v) {
    Polynomial<double> dh = h.derivative(v);
    if (dh.is_zero()) continue;
    const double d = dh.evaluate(point);
    const int idx = static_cast<int>(v);
    flow += idx < n * n ? d * comm(idx / n, idx % n) : d * fu(idx - n * n);
  }
  return {moment_map(w, f) * h.evaluate(point), flow / (2.0 * std::numbers::pi)};
}

/// Checked form: f must lie in Lie G(sigma); W is evaluated at eps.
inline std::pair<double, double> prequant_apply(const GradedAlgebra& alg, const Mat& f, const Polynomial<double>& h,
                                                const EpsMatrixPolynomial& w, const Vec& u, double eps,
                                                const PrequantOptions& opt = {}) {
  require_square(f, alg.dim(), "prequant_apply");
  if (opt.algebra_tol >= 0.0) {
    double r = symmetry_algebra_residual(alg, f);
    if (r > opt.algebra_tol * std::max(1.0, max_abs(f))) {
      throw DomainError("prequant_apply: f is not in Lie G(sigma) (residual " + std::to_string(r) + ")");
    }
  }
  return prequant_apply(f, h, w.evaluate(eps), u, opt.degree_bound);
}

/// Random element of Lie G(sigma), the tangent counterpart of sample_member.
inline Mat sample_algebra_member(const GradedAlgebra& alg, std::uint64_t seed) {
  const int n = alg.dim(), d0 = alg.d0_dim(), v1 = alg.v1_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat f = Mat::Zero(n, n);
  Mat a = Mat::Zero(v1, v1);
  for (const auto& b : detail::v1_symmetry_basis(alg)) a += normal(rng) * b;
  f.block(d0, d0, v1, v1) = a;
  for (int j = d0 + v1; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (alg.grade_index(i) <= alg.grade_index(j)) f(i, j) = normal(rng);
  return f;
}

}  // namespace hens
