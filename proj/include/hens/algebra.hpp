#pragma once

// Graded algebras with dilatations: structure constants, deformed brackets,
// nilpotentization, Jacobi residuals and axiom validation.

#include "hens/linalg.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hens {

inline constexpr double kDefaultTolerance = 1e-9;

/// One block of the grading. Label "D0" (alias "V0") is the null-metric block
/// and may only appear first; the others are "V1", "V2", ... in order.
struct Grade {
  std::string label;
  int dim = 0;
};

/// [e_i, e_j] has component `value` along e_k.
struct StructureEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

class GradedAlgebra {
 public:
  GradedAlgebra(std::string name, std::vector<Grade> grades, const std::vector<StructureEntry>& structure,
                Mat metric, std::vector<Mat> d0_rep = {})
      : name_(std::move(name)), d0_rep_(std::move(d0_rep)) {
    set_grades(std::move(grades));
    set_structure(structure);
    set_metric(std::move(metric));
    check_d0_rep();
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const std::vector<Grade>& grades() const { return grades_; }

  /// Step m: number of V-blocks.
  int step() const { return static_cast<int>(layer_dims_.size()) - 1; }
  int d0_dim() const { return layer_dims_[0]; }
  /// dim V1 (the block D carrying the positive-definite metric).
  int v1_dim() const { return layer_dims_.size() > 1 ? layer_dims_[1] : 0; }
  /// D0 + V1: the coordinates a horizontal control may use.
  int horizontal_dim() const { return d0_dim() + v1_dim(); }

  /// Layer 0 is D0, layer k >= 1 is V_k.
  int layer_offset(int layer) const { return layer_offsets_.at(static_cast<std::size_t>(layer)); }
  int layer_dim(int layer) const { return layer_dims_.at(static_cast<std::size_t>(layer)); }

  /// Grade index of basis vector i: 0 on D0, k on V_k.
  int grade_index(int i) const { return grade_of_[static_cast<std::size_t>(i)]; }
  /// Dilatation degree: 1 on D0, k on V_k.
  int degree(int i) const { return std::max(1, grade_index(i)); }
  bool in_d0(int i) const { return grade_index(i) == 0; }

  double c(int i, int j, int k) const {
    return dense_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k];
  }

  /// Canonical nonzero entries, i < j.
  const std::vector<StructureEntry>& structure() const { return entries_; }

  /// Metric on D0 + V1 (square of size horizontal_dim()).
  const Mat& metric() const { return metric_; }
  /// Metric restricted to the V1 block.
  Mat v1_metric() const { return metric_.bottomRightCorner(v1_dim(), v1_dim()); }

  const std::vector<Mat>& d0_rep() const { return d0_rep_; }
  bool has_d0_rep() const { return !d0_rep_.empty(); }

  /// Q = sum_i i * dim V_i.
  int homogeneous_dimension() const {
    int q = 0;
    for (int k = 1; k <= step(); ++k) q += k * layer_dim(k);
    return q;
  }

  const std::map<std::string, double>& labels() const { return labels_; }
  const std::vector<std::string>& notes() const { return notes_; }

  GradedAlgebra with_name(std::string name) const {
    GradedAlgebra out = *this;
    out.name_ = std::move(name);
    return out;
  }
  GradedAlgebra with_label(const std::string& key, double value) const {
    GradedAlgebra out = *this;
    out.labels_[key] = value;
    return out;
  }
  GradedAlgebra with_note(std::string note) const {
    GradedAlgebra out = *this;
    out.notes_.push_back(std::move(note));
    return out;
  }
  GradedAlgebra with_metric(Mat metric) const {
    GradedAlgebra out = *this;
    out.set_metric(std::move(metric));
    return out;
  }
  GradedAlgebra with_d0_rep(std::vector<Mat> rep) const {
    GradedAlgebra out = *this;
    out.d0_rep_ = std::move(rep);
    out.check_d0_rep();
    return out;
  }
  /// Same grading, metric and representation; new structure constants.
  GradedAlgebra with_structure(const std::vector<StructureEntry>& structure) const {
    GradedAlgebra out = *this;
    out.set_structure(structure);
    return out;
  }

 private:
  void set_grades(std::vector<Grade> grades) {
    if (grades.empty()) throw DimensionError("algebra needs at least one grade block");
    layer_dims_.assign(1, 0);
    std::size_t pos = 0;
    if (grades[0].label == "D0" || grades[0].label == "V0") {
      if (grades[0].dim < 0) throw DimensionError("negative grade dimension");
      layer_dims_[0] = grades[0].dim;
      grades[0].label = "D0";
      pos = 1;
    }
    for (int k = 1; pos < grades.size(); ++pos, ++k) {
      const auto& g = grades[pos];
      if (g.label != "V" + std::to_string(k)) {
        throw DimensionError("grade labels must be [D0,] V1, V2, ... in order; got '" + g.label + "'");
      }
      if (g.dim < 0) throw DimensionError("negative grade dimension");
      layer_dims_.push_back(g.dim);
    }
    grades_ = std::move(grades);
    layer_offsets_.assign(layer_dims_.size(), 0);
    dim_ = 0;
    grade_of_.clear();
    for (std::size_t l = 0; l < layer_dims_.size(); ++l) {
      layer_offsets_[l] = dim_;
      dim_ += layer_dims_[l];
      for (int a = 0; a < layer_dims_[l]; ++a) grade_of_.push_back(static_cast<int>(l));
    }
    if (dim_ <= 0) throw DimensionError("algebra dimension must be positive");
  }

  void set_structure(const std::vector<StructureEntry>& structure) {
    std::map<std::pair<int, int>, std::map<int, double>> canon;
    for (const auto& e : structure) {
      if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim_ || e.j >= dim_ || e.k >= dim_) {
        throw DimensionError("structure index out of range");
      }
      if (e.i == e.j) {
        if (e.value != 0.0) throw DomainError("structure constant [e_i, e_i] must vanish");
        continue;
      }
      int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
      double v = e.i < e.j ? e.value : -e.value;
      auto& row = canon[{i, j}];
      auto [it, inserted] = row.try_emplace(e.k, v);
      if (!inserted && std::abs(it->second - v) > 1e-12 * std::max(1.0, std::abs(v))) {
        throw DomainError("inconsistent structure constants for [e" + std::to_string(i) + ", e" +
                          std::to_string(j) + "] along e" + std::to_string(e.k));
      }
    }
    entries_.clear();
    dense_.assign(static_cast<std::size_t>(dim_) * dim_ * dim_, 0.0);
    for (const auto& [ij, row] : canon) {
      for (const auto& [k, v] : row) {
        if (v == 0.0) continue;
        entries_.push_back({ij.first, ij.second, k, v});
        dense_[(static_cast<std::size_t>(ij.first) * dim_ + ij.second) * dim_ + k] = v;
        dense_[(static_cast<std::size_t>(ij.second) * dim_ + ij.first) * dim_ + k] = -v;
      }
    }
  }

  void set_metric(Mat metric) {
    int h = horizontal_dim();
    if (metric.rows() == v1_dim() && metric.cols() == v1_dim() && d0_dim() > 0) {
      Mat full = Mat::Zero(h, h);
      full.bottomRightCorner(v1_dim(), v1_dim()) = metric;
      metric = full;
    }
    if (metric.rows() != h || metric.cols() != h) {
      throw DimensionError("metric must be square of size dim(D0)+dim(V1) or dim(V1)");
    }
    if (max_abs(Mat(metric - metric.transpose())) > 1e-12 * std::max(1.0, max_abs(metric))) {
      throw DomainError("metric must be symmetric");
    }
    metric_ = 0.5 * (metric + metric.transpose());
  }

  void check_d0_rep() const {
    if (d0_rep_.empty()) return;
    if (static_cast<int>(d0_rep_.size()) != d0_dim()) {
      throw DimensionError("d0_rep must assign one matrix per D0 basis vector");
    }
    for (const auto& q : d0_rep_) require_square(q, v1_dim(), "d0_rep matrix");
  }

  std::string name_;
  std::vector<Grade> grades_;
  std::vector<int> layer_dims_;
  std::vector<int> layer_offsets_;
  std::vector<int> grade_of_;
  int dim_ = 0;
  std::vector<StructureEntry> entries_;
  std::vector<double> dense_;
  Mat metric_;
  std::vector<Mat> d0_rep_;
  std::map<std::string, double> labels_;
  std::vector<std::string> notes_;
};

// ---------------------------------------------------------------------------
// Bracket arithmetic

/// Exponent of eps acquired by c[i][j][k] under the deformation
/// delta_eps^{-1}[delta_eps ., delta_eps .]: deg i + deg j - deg k.
inline int deformation_exponent(const GradedAlgebra& alg, int i, int j, int k) {
  return alg.degree(i) + alg.degree(j) - alg.degree(k);
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> bracket_t(const GradedAlgebra& alg,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(alg.dim());
  for (int a = 0; a < alg.dim(); ++a) out(a) = Scalar(0);
  for (const auto& e : alg.structure()) {
    out(e.k) += e.value * (u(e.i) * v(e.j) - u(e.j) * v(e.i));
  }
  return out;
}

inline Vec bracket(const GradedAlgebra& alg, const Vec& u, const Vec& v) {
  require_dim(u, alg.dim(), "bracket");
  require_dim(v, alg.dim(), "bracket");
  return bracket_t<double>(alg, u, v);
}

/// Matrix of y -> [x, y].
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> ad_matrix_t(
    const GradedAlgebra& alg, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(alg.dim(), alg.dim());
  for (int r = 0; r < alg.dim(); ++r)
    for (int s = 0; s < alg.dim(); ++s) m(r, s) = Scalar(0);
  for (const auto& e : alg.structure()) {
    m(e.k, e.j) += e.value * x(e.i);
    m(e.k, e.i) -= e.value * x(e.j);
  }
  return m;
}

inline Mat ad_matrix(const GradedAlgebra& alg, const Vec& x) {
  require_dim(x, alg.dim(), "ad_matrix");
  return ad_matrix_t<double>(alg, x);
}

inline void require_positive_eps(double eps, const char* what) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw DomainError(std::string(what) + ": scale must be positive and finite");
  }
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dilate_t(const GradedAlgebra& alg, double eps,
                                                  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = x;
  for (int i = 0; i < alg.dim(); ++i) out(i) *= std::pow(eps, alg.degree(i));
  return out;
}

inline Vec dilate(const GradedAlgebra& alg, double eps, const Vec& x) {
  require_positive_eps(eps, "dilate");
  require_dim(x, alg.dim(), "dilate");
  return dilate_t<double>(alg, eps, x);
}

inline Vec dilate_inverse(const GradedAlgebra& alg, double eps, const Vec& x) {
  require_positive_eps(eps, "dilate_inverse");
  return dilate(alg, 1.0 / eps, x);
}

/// Matrix of delta_eps.
inline Mat dilation_matrix(const GradedAlgebra& alg, double eps) {
  require_positive_eps(eps, "dilation_matrix");
  Vec d(alg.dim());
  for (int i = 0; i < alg.dim(); ++i) d(i) = std::pow(eps, alg.degree(i));
  return d.asDiagonal();
}

/// delta_eps^{-1} [delta_eps u, delta_eps v].
inline Vec deformed_bracket(const GradedAlgebra& alg, double eps, const Vec& u, const Vec& v) {
  require_positive_eps(eps, "deformed_bracket");
  require_dim(u, alg.dim(), "deformed_bracket");
  require_dim(v, alg.dim(), "deformed_bracket");
  return dilate_inverse(alg, eps, bracket(alg, dilate(alg, eps, u), dilate(alg, eps, v)));
}

/// delta_eps^{-1} * sigma: same grading and metric, bracket [.,.]_eps.
inline GradedAlgebra deformed_algebra(const GradedAlgebra& alg, double eps) {
  require_positive_eps(eps, "deformed_algebra");
  std::vector<StructureEntry> out;
  out.reserve(alg.structure().size());
  for (const auto& e : alg.structure()) {
    double v = e.value * std::pow(eps, deformation_exponent(alg, e.i, e.j, e.k));
    out.push_back({e.i, e.j, e.k, v});
  }
  return alg.with_structure(out);
}

// ---------------------------------------------------------------------------
// Jacobi identity

enum class JacobiMode { full, graded };

struct JacobiResult {
  double max_residual = 0.0;
  std::optional<std::array<int, 3>> worst;
  /// Basis triples whose residual exceeds the tolerance passed in.
  std::vector<std::array<int, 3>> offending;
  int evaluated = 0;
};

/// [[u,v],w] + [[w,u],v] + [[v,w],u].
inline Vec jacobiator(const GradedAlgebra& alg, const Vec& u, const Vec& v, const Vec& w) {
  return bracket(alg, bracket(alg, u, v), w) + bracket(alg, bracket(alg, w, u), v) +
         bracket(alg, bracket(alg, v, w), u);
}

/// Two of i+j <= m, j+k <= m, k+i <= m (grade indices, D0 counted as 0).
inline bool graded_jacobi_admissible(const GradedAlgebra& alg, int a, int b, int c) {
  int m = alg.step();
  int i = alg.grade_index(a), j = alg.grade_index(b), k = alg.grade_index(c);
  int count = (i + j <= m) + (j + k <= m) + (k + i <= m);
  return count >= 2;
}

inline JacobiResult jacobi_residual(const GradedAlgebra& alg, JacobiMode mode,
                                    double tol = kDefaultTolerance) {
  JacobiResult res;
  const int n = alg.dim();
  // The jacobiator is alternating, so strictly increasing triples suffice.
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        if (mode == JacobiMode::graded && !graded_jacobi_admissible(alg, a, b, c)) continue;
        ++res.evaluated;
        double r = max_abs(jacobiator(alg, basis_vector(n, a), basis_vector(n, b), basis_vector(n, c)));
        if (!res.worst || r > res.max_residual) {
          res.max_residual = r;
          res.worst = std::array<int, 3>{a, b, c};
        }
        if (r > tol) res.offending.push_back({a, b, c});
      }
  return res;
}

// ---------------------------------------------------------------------------
// Span helpers

/// Identity columns for all basis vectors whose grade index lies in [lo, hi].
inline Mat layer_columns(const GradedAlgebra& alg, int lo, int hi) {
  std::vector<int> idx;
  for (int i = 0; i < alg.dim(); ++i)
    if (alg.grade_index(i) >= lo && alg.grade_index(i) <= hi) idx.push_back(i);
  Mat m = Mat::Zero(alg.dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) m(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
  return m;
}

/// Columns [e_a, e_b] for a in layer la, b in layer lb.
inline Mat bracket_columns(const GradedAlgebra& alg, int la, int lb) {
  const int n = alg.dim();
  std::vector<Vec> cols;
  for (int a = alg.layer_offset(la); a < alg.layer_offset(la) + alg.layer_dim(la); ++a)
    for (int b = alg.layer_offset(lb); b < alg.layer_offset(lb) + alg.layer_dim(lb); ++b)
      cols.push_back(bracket(alg, basis_vector(n, a), basis_vector(n, b)));
  Mat m(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = cols[c];
  return m;
}

/// Largest component of the columns outside layers [lo, hi].
inline double outside_layers(const GradedAlgebra& alg, const Mat& cols, int lo, int hi) {
  double r = 0.0;
  for (int i = 0; i < alg.dim(); ++i) {
    int g = alg.grade_index(i);
    if (g >= lo && g <= hi) continue;
    if (cols.cols() > 0) r = std::max(r, cols.row(i).cwiseAbs().maxCoeff());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Nilpotentization

/// Entries whose deformation exponent is negative: they blow up as eps -> 0.
inline std::vector<StructureEntry> divergent_entries(const GradedAlgebra& alg, double tol = 0.0) {
  std::vector<StructureEntry> out;
  for (const auto& e : alg.structure())
    if (deformation_exponent(alg, e.i, e.j, e.k) < 0 && std::abs(e.value) > tol) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class Profile { homogeneous_space, homogeneous_ensemble, carnot };

inline const char* to_string(Profile p) {
  switch (p) {
    case Profile::homogeneous_space: return "homogeneous_space";
    case Profile::homogeneous_ensemble: return "homogeneous_ensemble";
    case Profile::carnot: return "carnot";
  }
  return "?";
}

inline Profile parse_profile(const std::string& s) {
  if (s == "homogeneous_space") return Profile::homogeneous_space;
  if (s == "homogeneous_ensemble") return Profile::homogeneous_ensemble;
  if (s == "carnot") return Profile::carnot;
  throw DomainError("unknown profile '" + s + "'");
}

enum class AxiomStatus { pass, fail, not_checked };

inline const char* to_string(AxiomStatus s) {
  switch (s) {
    case AxiomStatus::pass: return "pass";
    case AxiomStatus::fail: return "fail";
    case AxiomStatus::not_checked: return "not checked";
  }
  return "?";
}

struct AxiomCheck {
  std::string label;
  AxiomStatus status = AxiomStatus::pass;
  double residual = 0.0;
  std::string detail;
  std::optional<std::array<int, 3>> worst;
};

struct ValidationReport {
  Profile profile = Profile::homogeneous_ensemble;
  double tolerance = kDefaultTolerance;
  std::vector<AxiomCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.status == AxiomStatus::fail) return false;
    return true;
  }
  const AxiomCheck* find(const std::string& label) const {
    for (const auto& c : checks)
      if (c.label == label) return &c;
    return nullptr;
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (c.status == AxiomStatus::fail) out.push_back(c.label);
    return out;
  }
};

namespace detail {

inline AxiomCheck make_check(std::string label, double residual, double tol, std::string detail = {}) {
  AxiomCheck c;
  c.label = std::move(label);
  c.residual = residual;
  c.status = residual <= tol ? AxiomStatus::pass : AxiomStatus::fail;
  c.detail = std::move(detail);
  return c;
}

inline AxiomCheck check_jacobi(std::string label, const GradedAlgebra& alg, JacobiMode mode, double tol) {
  auto jr = jacobi_residual(alg, mode, tol);
  auto c = make_check(std::move(label), jr.max_residual, tol,
                      std::to_string(jr.evaluated) + " triples evaluated");
  if (jr.max_residual > tol) c.worst = jr.worst;
  return c;
}

inline AxiomCheck check_metric(std::string label, const GradedAlgebra& alg, double tol) {
  const Mat& g = alg.metric();
  int d0 = alg.d0_dim();
  double d0_part = 0.0;
  if (d0 > 0) {
    d0_part = std::max(max_abs(Mat(g.topRows(d0))), max_abs(Mat(g.leftCols(d0))));
  }
  double lam = min_eigenvalue(alg.v1_metric());
  std::string detail = "min eigenvalue on D " + std::to_string(lam) + ", max |g| on D0 " + std::to_string(d0_part);
  auto c = make_check(std::move(label), std::max(d0_part, std::max(0.0, -lam)), tol, detail);
  if (alg.v1_dim() == 0 || lam <= tol) {
    c.status = AxiomStatus::fail;
    if (alg.v1_dim() == 0) c.detail = "empty distribution D";
  }
  return c;
}

/// [u0, u] = Q(u0) u on V1, Q antisymmetric, injective, and a Lie morphism on D0.
inline AxiomCheck check_d0_action(std::string label, const GradedAlgebra& alg, double tol) {
  AxiomCheck c;
  c.label = std::move(label);
  if (alg.d0_dim() == 0) {
    c.detail = "D0 empty";
    return c;
  }
  if (!alg.has_d0_rep()) {
    c.status = AxiomStatus::not_checked;
    c.detail = "no d0_rep supplied";
    return c;
  }
  const int n = alg.dim(), p = alg.v1_dim(), off1 = alg.layer_offset(1);
  double r = 0.0;
  std::optional<std::array<int, 3>> worst;
  for (int a = 0; a < alg.d0_dim(); ++a) {
    const Mat& q = alg.d0_rep()[static_cast<std::size_t>(a)];
    r = std::max(r, max_abs(Mat(q + q.transpose())));
    for (int b = 0; b < p; ++b) {
      Vec expect = Vec::Zero(n);
      expect.segment(off1, p) = q.col(b);
      double e = max_abs(Vec(bracket(alg, basis_vector(n, a), basis_vector(n, off1 + b)) - expect));
      if (e > r) {
        r = e;
        worst = std::array<int, 3>{a, off1 + b, -1};
      }
    }
  }
  // injectivity
  Mat flat(p * p, alg.d0_dim());
  for (int a = 0; a < alg.d0_dim(); ++a)
    flat.col(a) = Eigen::Map<const Vec>(alg.d0_rep()[static_cast<std::size_t>(a)].data(), p * p);
  bool injective = numeric_rank(flat) == alg.d0_dim();
  // morphism: Q([a,b]) = [Q(a), Q(b)]
  for (int a = 0; a < alg.d0_dim(); ++a)
    for (int b = a + 1; b < alg.d0_dim(); ++b) {
      Vec ab = bracket(alg, basis_vector(n, a), basis_vector(n, b));
      Mat qab = Mat::Zero(p, p);
      for (int k = 0; k < alg.d0_dim(); ++k) qab += ab(k) * alg.d0_rep()[static_cast<std::size_t>(k)];
      const Mat& qa = alg.d0_rep()[static_cast<std::size_t>(a)];
      const Mat& qb = alg.d0_rep()[static_cast<std::size_t>(b)];
      r = std::max(r, max_abs(Mat(qab - (qa * qb - qb * qa))));
    }
  c = make_check(c.label, injective ? r : std::max(r, 1.0), tol, injective ? "" : "d0_rep is not injective");
  c.worst = r > tol ? worst : std::nullopt;
  return c;
}

/// V0 + ... + V_{i+j} = V0 + ... + V_j + [V_i, V_j] for i in {0,1}, i+j <= m.
inline AxiomCheck check_grading(std::string label, const GradedAlgebra& alg, double tol) {
  const int m = alg.step();
  double r = 0.0;
  std::string detail;
  for (int i = 0; i <= 1; ++i)
    for (int j = 0; j <= m; ++j) {
      if (i + j > m) continue;
      if (i == 1 && j == 0) continue;  // would force [V1, D0] to span V1
      Mat lhs = layer_columns(alg, 0, i + j);
      Mat br = bracket_columns(alg, i, j);
      Mat rhs = hcat(layer_columns(alg, 0, j), br);
      double out = outside_layers(alg, br, 0, i + j);
      r = std::max(r, out);
      auto rl = numeric_rank(lhs), rr = numeric_rank(rhs);
      if (rl != rr) {
        r = std::max(r, 1.0);
        detail += "span deficit at (i=" + std::to_string(i) + ", j=" + std::to_string(j) + "); ";
      }
    }
  return make_check(std::move(label), r, tol, detail);
}

/// Limit of the deformed bracket exists and is abelian D0 (+) Carnot(D + V2 + ...).
inline AxiomCheck check_cone_limit(std::string label, const GradedAlgebra& alg, double tol) {
  double r = 0.0;
  std::string detail;
  std::optional<std::array<int, 3>> worst;
  for (const auto& e : divergent_entries(alg, tol)) {
    if (std::abs(e.value) > r) worst = std::array<int, 3>{e.i, e.j, e.k};
    r = std::max(r, std::abs(e.value));
    detail = "deformed bracket diverges; ";
  }
  // Surviving (balanced) terms form the limit bracket.
  for (const auto& e : alg.structure()) {
    if (deformation_exponent(alg, e.i, e.j, e.k) != 0) continue;
    if (alg.in_d0(e.i) || alg.in_d0(e.j) || alg.in_d0(e.k)) {
      if (std::abs(e.value) > r) worst = std::array<int, 3>{e.i, e.j, e.k};
      r = std::max(r, std::abs(e.value));
      detail += "D0 not decoupled in the limit; ";
    }
  }
  std::vector<StructureEntry> limit;
  for (const auto& e : alg.structure())
    if (deformation_exponent(alg, e.i, e.j, e.k) == 0) limit.push_back(e);
  GradedAlgebra n = alg.with_structure(limit);
  for (int k = 1; k < alg.step(); ++k) {
    Mat br = bracket_columns(n, 1, k);
    if (numeric_rank(br) != alg.layer_dim(k + 1)) {
      r = std::max(r, 1.0);
      detail += "[V1,V" + std::to_string(k) + "]_N does not span V" + std::to_string(k + 1) + "; ";
    }
  }
  auto c = make_check(std::move(label), r, tol, detail);
  if (r > tol) c.worst = worst;
  return c;
}

/// [x0, delta_eps x] + D0 = delta_eps [x0, x] + D0.
inline AxiomCheck check_d0_dilatation(std::string label, const GradedAlgebra& alg, double tol) {
  double r = 0.0;
  std::optional<std::array<int, 3>> worst;
  for (int a = 0; a < alg.d0_dim(); ++a)
    for (int x = 0; x < alg.dim(); ++x)
      for (int k = 0; k < alg.dim(); ++k) {
        if (alg.in_d0(k) || alg.degree(k) == alg.degree(x)) continue;
        double v = std::abs(alg.c(a, x, k));
        if (v > r) {
          r = v;
          worst = std::array<int, 3>{a, x, k};
        }
      }
  auto c = make_check(std::move(label), r, tol);
  if (r > tol) c.worst = worst;
  return c;
}

inline AxiomCheck check_d0_subalgebra(std::string label, const GradedAlgebra& alg, double tol) {
  Mat br = bracket_columns(alg, 0, 0);
  return make_check(std::move(label), outside_layers(alg, br, 0, 0), tol);
}

inline AxiomCheck by_construction(std::string label, std::string detail) {
  AxiomCheck c;
  c.label = std::move(label);
  c.detail = std::move(detail);
  return c;
}

}  // namespace detail

inline ValidationReport validate_ensemble(const GradedAlgebra& alg, Profile profile,
                                          double tol = kDefaultTolerance) {
  using namespace detail;
  ValidationReport rep;
  rep.profile = profile;
  rep.tolerance = tol;
  switch (profile) {
    case Profile::homogeneous_space: {
      rep.checks.push_back(check_jacobi("homs-a", alg, JacobiMode::full, tol));
      rep.checks.push_back(by_construction("homs-b", "dilatations diagonal in the grade blocks"));
      rep.checks.push_back(check_metric("homs-c", alg, tol));
      auto sub = check_d0_subalgebra("homs-d", alg, tol);
      auto act = check_d0_action("homs-d", alg, tol);
      AxiomCheck d = act;
      if (sub.status == AxiomStatus::fail) {
        d.status = AxiomStatus::fail;
        d.residual = std::max(d.residual, sub.residual);
        d.detail += " D0 is not a subalgebra";
      }
      rep.checks.push_back(d);
      rep.checks.push_back(check_cone_limit("homs-e", alg, tol));
      rep.checks.push_back(check_d0_dilatation("homs-f", alg, tol));
      break;
    }
    case Profile::homogeneous_ensemble: {
      rep.checks.push_back(by_construction("home-a", "antisymmetric completion at load"));
      rep.checks.push_back(check_grading("home-b", alg, tol));
      rep.checks.push_back(check_jacobi("home-c", alg, JacobiMode::graded, tol));
      rep.checks.push_back(check_d0_action("home-d", alg, tol));
      rep.checks.push_back(by_construction("home-e", "degree map from the grade blocks"));
      rep.checks.push_back(check_metric("home-f", alg, tol));
      break;
    }
    case Profile::carnot: {
      rep.checks.push_back(make_check("carnot-no-d0", alg.d0_dim() > 0 ? 1.0 : 0.0, tol));
      double graded = 0.0;
      for (const auto& e : alg.structure())
        if (deformation_exponent(alg, e.i, e.j, e.k) != 0) graded = std::max(graded, std::abs(e.value));
      rep.checks.push_back(make_check("carnot-graded", graded, tol));
      double strat = 0.0;
      std::string detail;
      for (int k = 1; k < alg.step(); ++k) {
        if (numeric_rank(bracket_columns(alg, 1, k)) != alg.layer_dim(k + 1)) {
          strat = 1.0;
          detail += "[V1,V" + std::to_string(k) + "] != V" + std::to_string(k + 1) + "; ";
        }
      }
      for (int k = 1; k <= alg.step(); ++k)
        if (alg.layer_dim(k) == 0) {
          strat = 1.0;
          detail += "empty V" + std::to_string(k) + "; ";
        }
      rep.checks.push_back(make_check("carnot-stratification", strat, tol, detail));
      rep.checks.push_back(check_jacobi("carnot-jacobi", alg, JacobiMode::full, tol));
      rep.checks.push_back(check_metric("carnot-metric", alg, tol));
      break;
    }
  }
  return rep;
}

/// Bracket [u,v]_N = lim_{eps->0} [u,v]_eps: keeps exactly the balanced terms.
inline GradedAlgebra nilpotentize(const GradedAlgebra& alg, double tol = kDefaultTolerance) {
  auto grading = detail::check_grading("home-b", alg, tol);
  if (grading.status == AxiomStatus::fail) {
    throw ValidationError("nilpotentize: input fails home-b (" + grading.detail + ")");
  }
  auto div = divergent_entries(alg, tol);
  if (!div.empty()) {
    throw ValidationError("nilpotentize: deformed bracket diverges at [e" + std::to_string(div[0].i) + ", e" +
                          std::to_string(div[0].j) + "] -> e" + std::to_string(div[0].k));
  }
  std::vector<StructureEntry> kept;
  for (const auto& e : alg.structure())
    if (deformation_exponent(alg, e.i, e.j, e.k) == 0) kept.push_back(e);
  auto out = alg.with_structure(kept);
  if (alg.name().size() < 2 || alg.name().substr(alg.name().size() - 2) != "_N") {
    out = out.with_name(alg.name() + "_N");
  }
  return out;
}

/// True iff the lower central series reaches zero.
inline bool is_nilpotent(const GradedAlgebra& alg) {
  const int n = alg.dim();
  Mat span = Mat::Identity(n, n);
  for (int iter = 0; iter <= n; ++iter) {
    if (numeric_rank(span) == 0) return true;
    std::vector<Vec> cols;
    for (int a = 0; a < n; ++a)
      for (Eigen::Index c = 0; c < span.cols(); ++c) {
        Vec b = bracket(alg, basis_vector(n, a), span.col(c));
        if (max_abs(b) > 1e-13) cols.push_back(b);
      }
    if (cols.empty()) return true;
    Mat next(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) next.col(static_cast<Eigen::Index>(c)) = cols[c];
    if (numeric_rank(next) >= numeric_rank(span)) return false;
    // keep an orthonormal basis of the new span
    Eigen::ColPivHouseholderQR<Mat> qr(next);
    qr.setThreshold(1e-10);
    auto r = qr.rank();
    Mat q = qr.householderQ();
    span = q.leftCols(r);
  }
  return false;
}

/// Nilpotency class: smallest s with all (s+1)-fold brackets zero; -1 if not nilpotent.
inline int nilpotency_class(const GradedAlgebra& alg) {
  const int n = alg.dim();
  Mat span = Mat::Identity(n, n);
  for (int s = 0; s <= n; ++s) {
    auto rank = numeric_rank(span);
    if (rank == 0) return s;
    std::vector<Vec> cols;
    for (int a = 0; a < n; ++a)
      for (Eigen::Index c = 0; c < span.cols(); ++c) {
        Vec b = bracket(alg, basis_vector(n, a), span.col(c));
        if (max_abs(b) > 1e-13) cols.push_back(b);
      }
    if (cols.empty()) return s + 1;
    Mat next(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) next.col(static_cast<Eigen::Index>(c)) = cols[c];
    if (numeric_rank(next) >= rank) return -1;
    Eigen::ColPivHouseholderQR<Mat> qr(next);
    qr.setThreshold(1e-10);
    Mat q = qr.householderQ();
    span = q.leftCols(qr.rank());
  }
  return -1;
}

/// Max |c - c'| over all structure constants of two algebras of equal dimension.
inline double structure_distance(const GradedAlgebra& a, const GradedAlgebra& b) {
  if (a.dim() != b.dim()) throw DimensionError("structure_distance: dimension mismatch");
  double r = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      for (int k = 0; k < a.dim(); ++k) r = std::max(r, std::abs(a.c(i, j, k) - b.c(i, j, k)));
  return r;
}

}  // namespace hens
