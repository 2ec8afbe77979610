#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hens {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Out-of-domain argument: non-positive scale, singular map, zero rescaling.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input structure does not satisfy the axioms an operation requires.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-convergence, non-nilpotent input to an exact routine, exhausted budgets.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Vec& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
}

inline void require_square(const Mat& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + "x" +
                         std::to_string(n) + " matrix");
  }
}

/// Rank of the column span, pivot threshold relative to the largest column norm.
inline Eigen::Index numeric_rank(const Mat& cols, double threshold = 1e-10) {
  if (cols.cols() == 0 || cols.rows() == 0) return 0;
  double scale = cols.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(cols / scale);
  qr.setThreshold(threshold);
  return qr.rank();
}

inline Mat hcat(const Mat& a, const Mat& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

/// Smallest eigenvalue of a symmetric matrix; +inf for an empty matrix.
inline double min_eigenvalue(const Mat& sym) {
  if (sym.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

inline Vec to_vec(const std::vector<double>& xs) {
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline Vec basis_vector(Eigen::Index n, Eigen::Index i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace hens
