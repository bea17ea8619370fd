// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_NNLS_HPP
#define CONEFAN_NNLS_HPP

#include "conefan/common.hpp"

#include <algorithm>
#include <sstream>

namespace conefan {

struct NnlsResult {
  Vec coefficients;  // lambda >= 0
  Vec fitted;        // A * lambda
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for  min ||A lambda - b||  s.t. lambda >= 0.
///
/// Columns of `a` are the cone generators. The iteration cap defaults to
/// 100 * (number of columns); exceeding it raises NumericalError.
inline NnlsResult nnls(const Mat& a, const Vec& b, int max_iterations = -1) {
  const Eigen::Index m = a.cols();
  NnlsResult out;
  out.coefficients = Vec::Zero(m);
  if (m == 0) {
    out.fitted = Vec::Zero(b.size());
    out.residual_norm = b.norm();
    return out;
  }
  if (max_iterations < 0) max_iterations = static_cast<int>(100 * std::max<Eigen::Index>(m, 1));

  const double scale = 1.0 + b.norm();
  const double dual_tol = 1e-13 * scale;
  std::vector<char> passive(static_cast<std::size_t>(m), 0);
  // Columns whose first passive solve came out nonpositive; skipped until x moves.
  std::vector<char> blocked(static_cast<std::size_t>(m), 0);
  Vec x = Vec::Zero(m);
  Vec w = a.transpose() * b;
  int iter = 0;

  // Least squares restricted to the passive set; zero elsewhere.
  auto solve_passive = [&](Vec& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < m; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Mat ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    Vec zp = ap.colPivHouseholderQr().solve(b);
    z = Vec::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
  };

  while (true) {
    Eigen::Index t = -1;
    double best = dual_tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && !blocked[static_cast<std::size_t>(j)] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = 1;

    bool first = true;
    while (true) {
      if (++iter > max_iterations) {
        std::ostringstream msg;
        msg << "nnls: no convergence after " << max_iterations << " iterations (" << m
            << " generators, |b| = " << b.norm() << ")";
        throw NumericalError(msg.str());
      }
      Vec z;
      solve_passive(z);
      if (first && z(t) <= 0.0) {
        passive[static_cast<std::size_t>(t)] = 0;
        blocked[static_cast<std::size_t>(t)] = 1;
        break;
      }
      first = false;
      bool feasible = true;
      for (Eigen::Index j = 0; j < m; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          const double denom = x(j) - z(j);
          if (denom > 0.0) step = std::min(step, x(j) / denom);
        }
      }
      x += step * (z - x);
      for (Eigen::Index j = 0; j < m; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15 * scale) {
          passive[static_cast<std::size_t>(j)] = 0;
          x(j) = 0.0;
        }
      }
    }
    if (!first) std::fill(blocked.begin(), blocked.end(), 0);
    w = a.transpose() * (b - a * x);
  }

  out.coefficients = x;
  out.fitted = a * x;
  out.residual_norm = (b - out.fitted).norm();
  out.iterations = iter;
  return out;
}

}  // namespace conefan

#endif  // CONEFAN_NNLS_HPP
