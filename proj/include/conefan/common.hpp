// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_COMMON_HPP
#define CONEFAN_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conefan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ConeIndex = std::size_t;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (dimension mismatch, bad ranges, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure failed to converge or a step size underflowed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A fan invariant (face closure, pairwise face intersection) does not hold.
class FanInvariantError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Process-wide geometric tolerance used for membership and equality tests.
///
/// Set once at startup (the CLI does this from --tolerance or
/// CONEFAN_TOLERANCE); every other access is a read.
inline double& tolerance_setting() {
  static double tau = 1e-9;
  return tau;
}

inline double tolerance() { return tolerance_setting(); }

namespace linalg {

/// Orthonormal basis (as columns) of the span of the columns of `m`.
inline Mat column_basis(const Mat& m, double tol = 1e-9) {
  if (m.cols() == 0 || m.rows() == 0) return Mat(m.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n.
/// `basis` must already have orthonormal columns.
inline Mat orthogonal_complement(const Mat& basis, Eigen::Index n) {
  if (basis.cols() == 0) return Mat::Identity(n, n);
  if (basis.cols() >= n) return Mat(n, 0);
  Mat proj = Mat::Identity(n, n) - basis * basis.transpose();
  return column_basis(proj, 1e-8);
}

/// Orthonormal basis of {x : rows * x = 0}; `rows` is k x d.
inline Mat null_space(const Mat& rows, double tol = 1e-9) {
  const Eigen::Index d = rows.cols();
  if (rows.rows() == 0) return Mat::Identity(d, d);
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) ++rank;
  return svd.matrixV().rightCols(d - rank);
}

inline Eigen::Index rank(const Mat& m, double tol = 1e-9) { return column_basis(m, tol).cols(); }

inline Mat stack_columns(std::span<const Vec> vs, Eigen::Index n) {
  Mat m(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
  return m;
}

inline std::vector<Vec> columns(const Mat& m) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

}  // namespace linalg

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec make_vec(const std::vector<double>& xs) {
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace conefan

#endif  // CONEFAN_COMMON_HPP
