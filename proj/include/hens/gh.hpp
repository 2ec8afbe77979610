#pragma once

// Pointed Gromov-Hausdorff distance between finite pointed metric spaces.

#include "hens/linalg.hpp"
#include "hens/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace hens {

/// Finite pointed metric space: distance matrix and base point index.
struct PointedSample {
  Mat distances;
  int base = 0;
  /// Scale annotation (profile parameter).
  double eps = 1.0;
  /// Worst endpoint residual among the optimized distances that produced it.
  double solver_residual = 0.0;

  int size() const { return static_cast<int>(distances.rows()); }
  double diameter() const { return distances.size() ? distances.maxCoeff() : 0.0; }
};

/// Throws unless the matrix is square, symmetric, nonnegative with zero
/// diagonal and the base index is in range.
inline void check_sample(const PointedSample& s, const char* what = "sample") {
  const Mat& d = s.distances;
  if (d.rows() == 0 || d.rows() != d.cols()) throw DimensionError(std::string(what) + ": distance matrix must be square and nonempty");
  if (s.base < 0 || s.base >= d.rows()) throw DomainError(std::string(what) + ": base index out of range");
  const double scale = std::max(1.0, max_abs(d));
  for (int i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw DomainError(std::string(what) + ": nonzero diagonal");
    for (int j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) throw DomainError(std::string(what) + ": distances must be finite and nonnegative");
      if (std::abs(d(i, j) - d(j, i)) > 1e-12 * scale) throw DomainError(std::string(what) + ": distance matrix is not symmetric");
    }
  }
}

/// Largest violation of d(i,k) <= d(i,j) + d(j,k).
inline double triangle_violation(const Mat& d) {
  double worst = 0.0;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.rows(); ++j)
      for (int k = 0; k < d.rows(); ++k) worst = std::max(worst, d(i, k) - d(i, j) - d(j, k));
  return worst;
}

/// Same points, distances multiplied by `factor`.
inline PointedSample rescaled(const PointedSample& s, double factor) {
  PointedSample out = s;
  out.distances *= factor;
  return out;
}

enum class GhMode { exact, bound };

struct GhOptions {
  GhMode mode = GhMode::bound;
  int restarts = 8;
  std::uint64_t seed = 0;
  int local_search_sweeps = 30;
};

struct GhResult {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  /// Correspondence behind the upper bound (bound mode): partner of each
  /// point of the first sample in the second, and vice versa.
  std::vector<int> forward, backward;
};

inline constexpr int gh_exact_point_limit = 10;

namespace detail {

inline void check_gh_operand(const PointedSample& s, const char* what) {
  check_sample(s, what);
  if (s.diameter() > 2.0 + 1e-9) {
    throw DomainError(std::string(what) + ": diameter " + std::to_string(s.diameter()) + " exceeds 2");
  }
}

/// Lower bound from base-distance profiles: a coupling at level e forces
/// |d(x,a) - d(y,b)| < 2e for some partner b of every a in B(x, 1/e).
inline double anchored_lower(const PointedSample& a, const PointedSample& b) {
  struct Item {
    double radius, need;
  };
  std::vector<Item> items;
  auto collect = [&](const PointedSample& s, const PointedSample& t) {
    for (int p = 0; p < s.size(); ++p) {
      double r = s.distances(s.base, p);
      double best = std::numeric_limits<double>::infinity();
      for (int q = 0; q < t.size(); ++q) best = std::min(best, std::abs(r - t.distances(t.base, q)));
      items.push_back({r, 0.5 * best});
    }
  };
  collect(a, b);
  collect(b, a);
  std::vector<double> candidates{0.0};
  for (const auto& it : items) {
    candidates.push_back(it.need);
    if (it.radius > 0.0) candidates.push_back(1.0 / it.radius);
  }
  std::sort(candidates.begin(), candidates.end());
  for (double e : candidates) {
    bool ok = true;
    for (const auto& it : items) {
      bool inside = e == 0.0 || it.radius < 1.0 / e;
      if (inside && it.need > e) {
        ok = false;
        break;
      }
    }
    if (ok) return e;
  }
  return candidates.back();
}

struct Pair {
  int a, b;
};

inline double pair_mismatch(const PointedSample& A, const PointedSample& B, const Pair& p, const Pair& q) {
  return std::abs(A.distances(p.a, q.a) - B.distances(p.b, q.b));
}

inline double distortion(const PointedSample& A, const PointedSample& B, const std::vector<Pair>& rel) {
  double dis = 0.0;
  for (std::size_t i = 0; i < rel.size(); ++i)
    for (std::size_t j = i + 1; j < rel.size(); ++j) dis = std::max(dis, pair_mismatch(A, B, rel[i], rel[j]));
  return dis;
}

/// Exact pointed value on small samples: the least e such that some relation
/// containing the base pair has half-distortion <= e and relates every point
/// within distance < 1/e of its base point.
class ExactSearch {
 public:
  ExactSearch(const PointedSample& A, const PointedSample& B) : A_(A), B_(B) {}

  double solve() {
    std::vector<double> candidates{0.0};
    for (int i = 0; i < A_.size(); ++i)
      for (int j = 0; j < A_.size(); ++j)
        for (int k = 0; k < B_.size(); ++k)
          for (int l = 0; l < B_.size(); ++l)
            candidates.push_back(0.5 * std::abs(A_.distances(i, j) - B_.distances(k, l)));
    for (int i = 0; i < A_.size(); ++i)
      if (A_.distances(A_.base, i) > 0.0) candidates.push_back(1.0 / A_.distances(A_.base, i));
    for (int i = 0; i < B_.size(); ++i)
      if (B_.distances(B_.base, i) > 0.0) candidates.push_back(1.0 / B_.distances(B_.base, i));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double e : candidates)
      if (feasible(e)) return e;
    return candidates.back();
  }

  bool feasible(double e) {
    level_ = 2.0 * e + 1e-12;
    required_.clear();
    for (int i = 0; i < A_.size(); ++i)
      if (i != A_.base && (e == 0.0 || A_.distances(A_.base, i) < 1.0 / e)) required_.push_back({0, i});
    for (int i = 0; i < B_.size(); ++i)
      if (i != B_.base && (e == 0.0 || B_.distances(B_.base, i) < 1.0 / e)) required_.push_back({1, i});
    rel_.assign(1, Pair{A_.base, B_.base});
    return extend(0);
  }

 private:
  struct Required {
    int side, index;
  };

  bool compatible(const Pair& p) const {
    for (const auto& q : rel_)
      if (pair_mismatch(A_, B_, p, q) > level_) return false;
    return true;
  }

  bool covered(const Required& r) const {
    for (const auto& q : rel_)
      if ((r.side == 0 ? q.a : q.b) == r.index) return true;
    return false;
  }

  bool extend(std::size_t k) {
    if (k == required_.size()) return true;
    const Required& r = required_[k];
    if (covered(r)) return extend(k + 1);
    const int partners = r.side == 0 ? B_.size() : A_.size();
    for (int j = 0; j < partners; ++j) {
      Pair p = r.side == 0 ? Pair{r.index, j} : Pair{j, r.index};
      if (!compatible(p)) continue;
      rel_.push_back(p);
      if (extend(k + 1)) return true;
      rel_.pop_back();
    }
    return false;
  }

  const PointedSample& A_;
  const PointedSample& B_;
  double level_ = 0.0;
  std::vector<Required> required_;
  std::vector<Pair> rel_;
};

/// Full correspondence given by maps f: A -> B and g: B -> A.
struct Correspondence {
  std::vector<int> f, g;

  std::vector<Pair> pairs() const {
    std::vector<Pair> out;
    for (std::size_t a = 0; a < f.size(); ++a) out.push_back({static_cast<int>(a), f[a]});
    for (std::size_t b = 0; b < g.size(); ++b) out.push_back({g[b], static_cast<int>(b)});
    return out;
  }
};

/// Local search on sum |mismatch|^6 (a smooth surrogate for the max),
/// moving one partner at a time; base partners stay fixed.
inline void local_search(const PointedSample& A, const PointedSample& B, Correspondence& c, int sweeps) {
  auto cost_row = [&](const Pair& p, const std::vector<Pair>& rel, std::size_t skip) {
    double s = 0.0;
    for (std::size_t i = 0; i < rel.size(); ++i) {
      if (i == skip) continue;
      double m = pair_mismatch(A, B, p, rel[i]);
      double m2 = m * m;
      s += m2 * m2 * m2;
    }
    return s;
  };
  const std::size_t na = c.f.size();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool improved = false;
    std::vector<Pair> rel = c.pairs();
    for (std::size_t slot = 0; slot < rel.size(); ++slot) {
      const bool forward = slot < na;
      const int fixed_index = forward ? rel[slot].a : rel[slot].b;
      if (forward ? fixed_index == A.base : fixed_index == B.base) continue;
      double current = cost_row(rel[slot], rel, slot);
      const int options = forward ? B.size() : A.size();
      int best = -1;
      for (int j = 0; j < options; ++j) {
        Pair p = forward ? Pair{fixed_index, j} : Pair{j, fixed_index};
        double cst = cost_row(p, rel, slot);
        if (cst < current * (1.0 - 1e-12)) {
          current = cst;
          best = j;
        }
      }
      if (best >= 0) {
        if (forward) {
          rel[slot].b = best;
          c.f[static_cast<std::size_t>(fixed_index)] = best;
        } else {
          rel[slot].a = best;
          c.g[static_cast<std::size_t>(fixed_index)] = best;
        }
        improved = true;
      }
    }
    if (!improved) break;
  }
}

/// Partner with the closest base distance.
inline std::vector<int> greedy_map(const PointedSample& S, const PointedSample& T) {
  std::vector<int> m(static_cast<std::size_t>(S.size()));
  for (int p = 0; p < S.size(); ++p) {
    double r = S.distances(S.base, p);
    int best = T.base;
    double gap = std::numeric_limits<double>::infinity();
    for (int q = 0; q < T.size(); ++q) {
      double d = std::abs(r - T.distances(T.base, q));
      if (d < gap) {
        gap = d;
        best = q;
      }
    }
    m[static_cast<std::size_t>(p)] = p == S.base ? T.base : best;
  }
  return m;
}

inline GhResult correspondence_bound(const PointedSample& A, const PointedSample& B, const GhOptions& opt) {
  std::vector<Correspondence> starts;
  if (A.size() == B.size()) {
    Correspondence id;
    for (int i = 0; i < A.size(); ++i) {
      id.f.push_back(i);
      id.g.push_back(i);
    }
    if (A.base == B.base) starts.push_back(id);
  }
  starts.push_back({greedy_map(A, B), greedy_map(B, A)});
  const std::size_t fixed = starts.size();
  std::vector<Correspondence> results(fixed + static_cast<std::size_t>(std::max(0, opt.restarts)));
  std::vector<double> dis(results.size());
  parallel_for(results.size(), [&](std::size_t idx) {
    Correspondence c;
    if (idx < fixed) {
      c = starts[idx];
    } else {
      std::mt19937_64 rng(derive_seed(opt.seed, idx));
      std::uniform_int_distribution<int> pa(0, A.size() - 1), pb(0, B.size() - 1);
      c.f.resize(static_cast<std::size_t>(A.size()));
      c.g.resize(static_cast<std::size_t>(B.size()));
      for (auto& v : c.f) v = pb(rng);
      for (auto& v : c.g) v = pa(rng);
      c.f[static_cast<std::size_t>(A.base)] = B.base;
      c.g[static_cast<std::size_t>(B.base)] = A.base;
    }
    Correspondence before = c;
    double d0 = distortion(A, B, before.pairs());
    local_search(A, B, c, opt.local_search_sweeps);
    double d1 = distortion(A, B, c.pairs());
    if (d0 < d1) {
      c = before;
      d1 = d0;
    }
    results[idx] = c;
    dis[idx] = d1;
  });
  std::size_t best = static_cast<std::size_t>(std::min_element(dis.begin(), dis.end()) - dis.begin());
  GhResult r;
  r.upper = 0.5 * dis[best];
  r.forward = results[best].f;
  r.backward = results[best].g;
  return r;
}

}  // namespace detail

/// Pointed Gromov-Hausdorff distance between finite pointed spaces of
/// diameter <= 2. Exact mode (at most 10 points in total) returns the exact
/// value for these finite samples; bound mode returns half the distortion of
/// the best correspondence found (upper) and the base-anchored lower bound.
inline GhResult gh_distance(const PointedSample& A, const PointedSample& B, const GhOptions& opt = {}) {
  detail::check_gh_operand(A, "gh_distance (first)");
  detail::check_gh_operand(B, "gh_distance (second)");
  GhResult r;
  const double lower = std::max(detail::anchored_lower(A, B), 0.0);
  if (opt.mode == GhMode::exact) {
    if (A.size() + B.size() > gh_exact_point_limit) {
      throw DomainError("gh_distance: exact mode is limited to " + std::to_string(gh_exact_point_limit) + " points");
    }
    double v = detail::ExactSearch(A, B).solve();
    r.lower = r.upper = v;
    r.exact = true;
    return r;
  }
  GhResult ab = detail::correspondence_bound(A, B, opt);
  GhResult ba = detail::correspondence_bound(B, A, opt);
  if (ba.upper < ab.upper) {
    r.upper = ba.upper;
    r.forward = ba.backward;
    r.backward = ba.forward;
  } else {
    r = ab;
  }
  r.lower = std::min(lower, r.upper);
  return r;
}

}  // namespace hens
