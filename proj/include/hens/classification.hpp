#pragma once

// Parameterized bracket families, their Jacobi constraint polynomials, and the
// normal forms and rescaling invariants of the low-dimensional families.

#include "hens/algebra.hpp"
#include "hens/builtins.hpp"
#include "hens/polynomial.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hens {

/// Structure constants that are polynomials in named real parameters.
class ParamBracket {
 public:
  ParamBracket(std::string name, std::vector<Grade> grades, std::vector<std::string> params)
      : name_(std::move(name)), grades_(std::move(grades)), params_(std::move(params)) {
    dim_ = 0;
    for (const auto& g : grades_) dim_ += g.dim;
    if (dim_ <= 0) throw DimensionError("ParamBracket: empty algebra");
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<Grade>& grades() const { return grades_; }
  const std::vector<std::string>& params() const { return params_; }

  Poly param(const std::string& p) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i] == p) return Poly::variable(i);
    throw DomainError("ParamBracket: unknown parameter '" + p + "'");
  }

  /// Adds `value` to c[i][j][k] (and its negative to c[j][i][k]).
  ParamBracket& add(int i, int j, int k, const Poly& value) {
    check_index(i);
    check_index(j);
    check_index(k);
    if (i == j) throw DomainError("ParamBracket: [e_i, e_i] must vanish");
    if (i < j) {
      entries_[{i, j, k}] += value;
    } else {
      entries_[{j, i, k}] -= value;
    }
    return *this;
  }

  Poly c(int i, int j, int k) const {
    if (i == j) return Poly();
    auto key = i < j ? std::array<int, 3>{i, j, k} : std::array<int, 3>{j, i, k};
    auto it = entries_.find(key);
    if (it == entries_.end()) return Poly();
    return i < j ? it->second : -it->second;
  }

  /// Numeric algebra at a parameter assignment.
  GradedAlgebra instantiate(const std::vector<double>& values, const Mat& metric, std::vector<Mat> d0_rep = {}) const {
    if (values.size() != params_.size()) throw DimensionError("ParamBracket: wrong number of parameter values");
    std::vector<StructureEntry> s;
    for (const auto& [key, poly] : entries_) {
      double v = poly.evaluate(values);
      if (v != 0.0) s.push_back({key[0], key[1], key[2], v});
    }
    return GradedAlgebra(name_, grades_, s, metric, std::move(d0_rep));
  }

  /// Same grading with zero bracket; used for degree bookkeeping.
  GradedAlgebra skeleton() const {
    int v1 = 0;
    for (const auto& g : grades_)
      if (g.label == "V1") v1 = g.dim;
    return GradedAlgebra(name_, grades_, {}, Mat::Identity(v1, v1));
  }

 private:
  void check_index(int i) const {
    if (i < 0 || i >= dim_) throw DimensionError("ParamBracket: basis index out of range");
  }

  std::string name_;
  std::vector<Grade> grades_;
  std::vector<std::string> params_;
  int dim_ = 0;
  std::map<std::array<int, 3>, Poly> entries_;
};

/// Components of all Jacobi identities on basis triples (graded mode keeps
/// the admissible triples only), as polynomials in the parameters, with zero
/// polynomials dropped and duplicates up to a scalar factor removed. Each
/// polynomial is scaled to leading coefficient 1.
inline std::vector<Poly> jacobi_constraints(const ParamBracket& pb, JacobiMode mode = JacobiMode::full) {
  const int n = pb.dim();
  GradedAlgebra skel = pb.skeleton();
  std::vector<Poly> out;
  auto push = [&](const Poly& p) {
    Poly q = p.pruned(1e-14);
    if (q.is_zero()) return;
    q = q.normalized(true);
    for (const auto& existing : out)
      if (existing == q) return;
    out.push_back(q);
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        if (mode == JacobiMode::graded && !graded_jacobi_admissible(skel, a, b, c)) continue;
        for (int l = 0; l < n; ++l) {
          Poly acc;
          for (int m = 0; m < n; ++m) {
            acc += pb.c(b, c, m) * pb.c(a, m, l);
            acc += pb.c(c, a, m) * pb.c(b, m, l);
            acc += pb.c(a, b, m) * pb.c(c, m, l);
          }
          push(acc);
        }
      }
  return out;
}

/// Largest |p(values)| over the system.
inline double constraint_residual(const std::vector<Poly>& system, const std::vector<double>& values) {
  double r = 0.0;
  for (const auto& p : system) r = std::max(r, std::abs(p.evaluate(values)));
  return r;
}

// ---------------------------------------------------------------------------
// Families

/// Surface family before Jacobi: parameters (a, b, c, d),
/// [X0,X1] = a X2, [X0,X2] = -a X1, [X1,X2] = b X0 + c X1 + d X2.
inline ParamBracket surface_family_general() {
  ParamBracket pb("surface_general", {{"D0", 1}, {"V1", 2}}, {"a", "b", "c", "d"});
  pb.add(0, 1, 2, pb.param("a"))
      .add(0, 2, 1, -pb.param("a"))
      .add(1, 2, 0, pb.param("b"))
      .add(1, 2, 1, pb.param("c"))
      .add(1, 2, 2, pb.param("d"));
  return pb;
}

/// Solved surface table with curvature label |ab|.
inline GradedAlgebra surface_family(double a, double b) { return so3_surface(a, b); }

/// Contact normal form on three generators (see contact3 in builtins).
inline GradedAlgebra contact3_normal_form(double rho, double phi, double gamma) { return contact3(rho, phi, gamma); }

/// contact3 at fixed angle phi as a family in (rho, gamma).
inline ParamBracket contact3_family(double phi) {
  ParamBracket pb("contact3_family", {{"V1", 2}, {"V2", 1}}, {"rho", "gamma"});
  const double c = std::cos(phi), s = std::sin(phi);
  Poly rho = pb.param("rho"), gamma = pb.param("gamma");
  pb.add(0, 1, 2, Poly(1.0))
      .add(1, 2, 0, rho * (c * c))
      .add(1, 2, 1, rho * (s * c))
      .add(1, 2, 2, gamma * c)
      .add(2, 0, 0, rho * (s * c))
      .add(2, 0, 1, rho * (s * s))
      .add(2, 0, 2, gamma * s);
  return pb;
}

/// Four-dimensional contact family with the brackets allowed before the
/// Jacobi identity is imposed: [X0,X1] = a X2, [X0,X2] = -a X1,
/// [X0,X3] = b03 X0 + e03 X3, [Xi,Xj] = bij X0 + cij X1 + dij X2 + eij X3
/// for (i,j) in {(1,2), (1,3), (2,3)}.
inline ParamBracket contact4_family_general() {
  std::vector<std::string> names{"a", "b03", "e03"};
  for (const char* ij : {"12", "13", "23"})
    for (const char* x : {"b", "c", "d", "e"}) names.push_back(std::string(x) + ij);
  ParamBracket pb("contact4_general", {{"D0", 1}, {"V1", 2}, {"V2", 1}}, names);
  pb.add(0, 1, 2, pb.param("a")).add(0, 2, 1, -pb.param("a"));
  pb.add(0, 3, 0, pb.param("b03")).add(0, 3, 3, pb.param("e03"));
  for (auto [i, j] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}}) {
    std::string ij = std::to_string(i) + std::to_string(j);
    pb.add(i, j, 0, pb.param("b" + ij))
        .add(i, j, 1, pb.param("c" + ij))
        .add(i, j, 2, pb.param("d" + ij))
        .add(i, j, 3, pb.param("e" + ij));
  }
  return pb;
}

/// Solved four-dimensional table in parameters (a, b12, e12, d):
/// [X0,X1] = a X2, [X0,X2] = -a X1, [X0,X3] = 0, [X1,X2] = b12 X0 + e12 X3,
/// [X1,X3] = d X2, [X2,X3] = -d X1.
inline ParamBracket contact4_family_solved() {
  ParamBracket pb("contact4_solved", {{"D0", 1}, {"V1", 2}, {"V2", 1}}, {"a", "b12", "e12", "d"});
  pb.add(0, 1, 2, pb.param("a"))
      .add(0, 2, 1, -pb.param("a"))
      .add(1, 2, 0, pb.param("b12"))
      .add(1, 2, 3, pb.param("e12"))
      .add(1, 3, 2, pb.param("d"))
      .add(2, 3, 1, -pb.param("d"));
  return pb;
}

// ---------------------------------------------------------------------------
// contact4 rescaling

struct Contact4Params {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double b12 = 0.0;
  double d = 0.0;
  double e12 = 1.0;
};

/// Rescaling X1, X2 by alpha1 and X3 by alpha2:
/// (l1, l2, b12, d, e12) -> (a1^2 l1, a1^2 l2, a1^2 b12, a2 d, (a1^2 / a2) e12).
inline Contact4Params contact4_reduce(const Contact4Params& p, double alpha1, double alpha2) {
  if (alpha1 == 0.0 || alpha2 == 0.0) throw DomainError("contact4_reduce: rescaling factors must be nonzero");
  if (!(p.lambda1 > 0.0)) throw DomainError("contact4_reduce: lambda1 must be positive");
  const double a1 = alpha1 * alpha1;
  return {a1 * p.lambda1, a1 * p.lambda2, a1 * p.b12, alpha2 * p.d, a1 / alpha2 * p.e12};
}

/// (d e12 / lambda1, lambda2 / lambda1).
inline std::pair<double, double> contact4_invariants(const Contact4Params& p) {
  if (!(p.lambda1 > 0.0)) throw DomainError("contact4_invariants: lambda1 must be positive");
  return {p.d * p.e12 / p.lambda1, p.lambda2 / p.lambda1};
}

inline GradedAlgebra contact4_algebra(const Contact4Params& p, double a = 1.0) {
  return contact4(p.lambda1, p.lambda2, p.b12, p.d, p.e12, a);
}

}  // namespace hens
