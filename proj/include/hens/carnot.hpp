#pragma once

// Group arithmetic in exponential coordinates of the first kind: BCH product,
// conical product beta, horizontal-linear checks and Pansu-type difference
// quotients.

#include "hens/algebra.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace hens {

template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline double scalar_value(double v) { return v; }
template <class D>
double scalar_value(const Eigen::AutoDiffScalar<D>& v) {
  return v.value();
}

/// Coefficients b_k of s / (1 - exp(-s)) = sum_k b_k s^k (b_k = B_k^+ / k!).
inline const std::vector<double>& bch_ode_coefficients() {
  static const std::vector<double> coeffs = [] {
    constexpr int kMax = 60;
    // Bernoulli numbers with B_1 = -1/2 from sum_{j<=n} C(n+1, j) B_j = 0.
    std::vector<double> b(kMax + 1, 0.0);
    b[0] = 1.0;
    for (int n = 1; n <= kMax; ++n) {
      double acc = 0.0, binom = 1.0;  // C(n+1, 0)
      for (int j = 0; j < n; ++j) {
        acc += binom * b[static_cast<std::size_t>(j)];
        binom = binom * (n + 1 - j) / (j + 1);
      }
      b[static_cast<std::size_t>(n)] = -acc / (n + 1);
    }
    b[1] = 0.5;
    std::vector<double> out(kMax + 1);
    double fact = 1.0;
    for (int k = 0; k <= kMax; ++k) {
      if (k > 0) fact *= k;
      out[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k)] / fact;
    }
    return out;
  }();
  return coeffs;
}

struct BchResult {
  Vec value;
  /// Computed by numerical integration rather than a terminating series.
  bool approximate = false;
  /// ||ad_Z|| reached 2*pi somewhere along the integration.
  bool outside_convergence = false;
};

/// BCH product log(e^x e^y) on a fixed algebra. Nilpotent inputs use the
/// terminating series; others integrate Z' = g(ad_Z) y, g(s) = s/(1-e^{-s}).
class BchEngine {
 public:
  explicit BchEngine(const GradedAlgebra& alg) : alg_(alg), class_(hens::nilpotency_class(alg)) {}

  const GradedAlgebra& algebra() const { return alg_; }
  bool nilpotent() const { return class_ >= 0; }
  int nilpotency_class() const { return class_; }

  template <class S>
  VecT<S> product(const VecT<S>& x, const VecT<S>& y, int ode_steps = 0) const {
    if (nilpotent()) return series(x, y);
    return integrate(x, y, ode_steps, nullptr);
  }

  BchResult product_checked(const Vec& x, const Vec& y, int ode_steps = 0) const {
    require_dim(x, alg_.dim(), "bch");
    require_dim(y, alg_.dim(), "bch");
    BchResult r;
    if (nilpotent()) {
      r.value = series<double>(x, y);
      return r;
    }
    r.approximate = true;
    r.value = integrate<double>(x, y, ode_steps, &r.outside_convergence);
    return r;
  }

  Vec product(const Vec& x, const Vec& y) const { return product_checked(x, y).value; }

 private:
  /// Z(t) = log(e^x e^{ty}) is a polynomial in t of degree <= class; its
  /// coefficients follow from Z' = sum_k b_k ad_Z^k y order by order.
  template <class S>
  VecT<S> series(const VecT<S>& x, const VecT<S>& y) const {
    const int order = std::max(class_, 1);
    const auto& b = bch_ode_coefficients();
    const Eigen::Index n = x.size();
    VecT<S> zero = VecT<S>::Zero(n);
    std::vector<VecT<S>> z(static_cast<std::size_t>(order) + 1, zero);
    z[0] = x;
    // w[k][d]: t^d coefficient of ad_Z^k y
    std::vector<std::vector<VecT<S>>> w(static_cast<std::size_t>(order),
                                        std::vector<VecT<S>>(static_cast<std::size_t>(order), zero));
    w[0][0] = y;
    for (int d = 0; d < order; ++d) {
      VecT<S> acc = b[0] * w[0][static_cast<std::size_t>(d)];
      for (int k = 1; k < order; ++k) {
        VecT<S> term = zero;
        for (int a = 0; a <= d; ++a) {
          term += bracket_t<S>(alg_, z[static_cast<std::size_t>(a)],
                               w[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(d - a)]);
        }
        w[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] = term;
        acc += b[static_cast<std::size_t>(k)] * term;
      }
      z[static_cast<std::size_t>(d) + 1] = acc / S(d + 1);
    }
    VecT<S> out = zero;
    for (const auto& zi : z) out += zi;
    return out;
  }

  template <class S>
  VecT<S> rhs(const VecT<S>& z, const VecT<S>& y, bool* outside) const {
    const auto& b = bch_ode_coefficients();
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> ad = ad_matrix_t<S>(alg_, z);
    double norm = 0.0;
    for (Eigen::Index i = 0; i < ad.rows(); ++i)
      for (Eigen::Index j = 0; j < ad.cols(); ++j) norm += scalar_value(ad(i, j)) * scalar_value(ad(i, j));
    norm = std::sqrt(norm);
    if (outside && norm >= 2.0 * std::numbers::pi) *outside = true;
    VecT<S> term = y;
    VecT<S> acc = b[0] * y;
    const double ratio = norm / (2.0 * std::numbers::pi);
    double bound = 1.0;
    for (std::size_t k = 1; k < b.size(); ++k) {
      term = ad * term;
      if (b[k] != 0.0) acc += b[k] * term;
      bound *= ratio;
      if (bound < 1e-17) break;
    }
    return acc;
  }

  template <class S>
  VecT<S> integrate(const VecT<S>& x, const VecT<S>& y, int steps, bool* outside) const {
    if (steps <= 0) {
      double ny = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) ny = std::max(ny, std::abs(scalar_value(y(i))));
      steps = std::clamp(static_cast<int>(std::ceil(64.0 * ny)), 2, 512);
    }
    const double h = 1.0 / steps;
    VecT<S> z = x;
    for (int s = 0; s < steps; ++s) {
      VecT<S> k1 = rhs<S>(z, y, outside);
      VecT<S> k2 = rhs<S>(VecT<S>(z + (0.5 * h) * k1), y, outside);
      VecT<S> k3 = rhs<S>(VecT<S>(z + (0.5 * h) * k2), y, outside);
      VecT<S> k4 = rhs<S>(VecT<S>(z + h * k3), y, outside);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
  }

  GradedAlgebra alg_;
  int class_;
};

/// Exact BCH product on a nilpotent algebra; throws NumericError otherwise.
inline Vec bch_product(const GradedAlgebra& alg, const Vec& x, const Vec& y) {
  BchEngine eng(alg);
  if (!eng.nilpotent()) {
    throw NumericError("bch_product: algebra '" + alg.name() +
                       "' is not nilpotent; the BCH series does not terminate");
  }
  return eng.product(x, y);
}

/// BCH product for any algebra; the result carries the approximation flags.
inline BchResult bch(const GradedAlgebra& alg, const Vec& x, const Vec& y) {
  return BchEngine(alg).product_checked(x, y);
}

inline Vec group_inverse(const Vec& x) { return -x; }

// ---------------------------------------------------------------------------
// Conical product

/// beta(x, y) = lim delta_eps^{-1}((delta_eps x)(delta_eps y)), evaluated as the
/// BCH product of the nilpotentized algebra.
inline Vec conical_product(const GradedAlgebra& alg, const Vec& x, const Vec& y) {
  return bch_product(nilpotentize(alg), x, y);
}

struct ConicalLimit {
  std::vector<double> eps;
  std::vector<Vec> values;   // delta_eps^{-1}(bch(delta_eps x, delta_eps y))
  std::vector<double> errors;  // |values - beta|_inf
  Vec extrapolated;          // extrapolated from the three smallest eps
  Vec closed_form;           // conical_product(x, y)
  double extrapolation_error = 0.0;
  bool agrees = false;       // extrapolation_error < threshold
};

/// Numerical conical limit over a decreasing eps ladder; the error is taken to
/// be a eps + b eps^2 + O(eps^3) for the extrapolation.
inline ConicalLimit conical_limit(const GradedAlgebra& alg, const Vec& x, const Vec& y,
                                  const std::vector<double>& eps_list, double threshold = 1e-6) {
  if (eps_list.size() < 3) throw DomainError("conical_limit: need at least three eps values");
  ConicalLimit out;
  out.closed_form = conical_product(alg, x, y);
  BchEngine eng(alg);
  for (double e : eps_list) {
    require_positive_eps(e, "conical_limit");
    Vec v = dilate_inverse(alg, e, eng.product(dilate(alg, e, x), dilate(alg, e, y)));
    out.eps.push_back(e);
    out.errors.push_back(max_abs(Vec(v - out.closed_form)));
    out.values.push_back(std::move(v));
  }
  // Polynomial extrapolation to eps = 0 through the three smallest scales.
  const std::size_t k = out.values.size();
  out.extrapolated = Vec::Zero(x.size());
  for (std::size_t a = k - 3; a < k; ++a) {
    double w = 1.0;
    for (std::size_t b = k - 3; b < k; ++b)
      if (b != a) w *= out.eps[b] / (out.eps[b] - out.eps[a]);
    out.extrapolated += w * out.values[a];
  }
  out.extrapolation_error = max_abs(Vec(out.extrapolated - out.closed_form));
  out.agrees = out.extrapolation_error < threshold * std::max(1.0, max_abs(out.closed_form));
  return out;
}

// ---------------------------------------------------------------------------
// Horizontal linear maps and Pansu differences

struct LinearityCheck {
  bool linear = false;
  double residual = 0.0;
  double dilatation_residual = 0.0;
  double morphism_residual = 0.0;
};

inline LinearityCheck is_horizontal_linear(const GradedAlgebra& alg, const Mat& F, double tol = kDefaultTolerance,
                                           std::uint64_t seed = 1, int samples = 16) {
  require_square(F, alg.dim(), "is_horizontal_linear");
  BchEngine eng(alg);
  if (!eng.nilpotent()) throw ValidationError("is_horizontal_linear: algebra is not nilpotent");
  LinearityCheck c;
  for (double e : {0.5, 2.0, 3.0}) {
    Mat d = dilation_matrix(alg, e);
    c.dilatation_residual = std::max(c.dilatation_residual, max_abs(Mat(F * d - d * F)));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto sample = [&] {
    Vec v(alg.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = unif(rng);
    return v;
  };
  for (int s = 0; s < samples; ++s) {
    Vec x = sample(), y = sample();
    Vec lhs = F * eng.product(x, y);
    Vec rhs = eng.product(Vec(F * x), Vec(F * y));
    c.morphism_residual = std::max(c.morphism_residual, max_abs(Vec(lhs - rhs)));
  }
  c.residual = std::max(c.dilatation_residual, c.morphism_residual);
  c.linear = c.residual <= tol * std::max(1.0, max_abs(F));
  return c;
}

using GroupMap = std::function<Vec(const Vec&)>;

/// delta_t^{-1}(f(x)^{-1} f(x delta_t y)).
inline Vec pansu_difference(const BchEngine& eng, const GroupMap& f, const Vec& x, double t, const Vec& y) {
  require_positive_eps(t, "pansu_difference");
  const auto& alg = eng.algebra();
  Vec fx = f(x);
  Vec moved = f(eng.product(x, dilate(alg, t, y)));
  return dilate_inverse(alg, t, eng.product(group_inverse(fx), moved));
}

inline Vec pansu_difference(const GradedAlgebra& alg, const GroupMap& f, const Vec& x, double t, const Vec& y) {
  return pansu_difference(BchEngine(alg), f, x, t, y);
}

/// Difference quotient of op(x,u) = xu on the double G x G with product
/// (x,u)(y,v) = (xy, y^{-1} u y v):
/// delta_eps^{-1}(op(x,u)^{-1} op((x,u) (delta_eps y, delta_eps v))).
inline Vec op_derivative_probe(const BchEngine& eng, const Vec& x, const Vec& u, const Vec& y, const Vec& v,
                               double eps) {
  require_positive_eps(eps, "op_derivative_probe");
  const auto& alg = eng.algebra();
  Vec dy = dilate(alg, eps, y), dv = dilate(alg, eps, v);
  Vec first = eng.product(x, dy);
  Vec second = eng.product(eng.product(eng.product(group_inverse(dy), u), dy), dv);
  Vec op_xu = eng.product(x, u);
  Vec op_prod = eng.product(first, second);
  return dilate_inverse(alg, eps, eng.product(group_inverse(op_xu), op_prod));
}

/// [L_{(delta_l x)^{-1}}, delta_l^{-1}] y = (delta_l x)^{-1} delta_l^{-1}(delta_l x delta_l y).
inline Vec translation_commutator_probe(const BchEngine& eng, const Vec& x, const Vec& y, double lambda) {
  require_positive_eps(lambda, "translation_commutator_probe");
  const auto& alg = eng.algebra();
  Vec dx = dilate(alg, lambda, x);
  Vec inner = dilate_inverse(alg, lambda, eng.product(dx, dilate(alg, lambda, y)));
  return eng.product(group_inverse(dx), inner);
}

/// Observed convergence order from errors at a geometric eps ladder.
inline double observed_order(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size() || eps.size() < 2) throw DomainError("observed_order: need matched ladders");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double lx = std::log(eps[i]), ly = std::log(std::max(errors[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace hens
