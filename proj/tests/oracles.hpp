// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0
//
// Brute-force reference implementations used only by the tests. None of them
// call the library's projection, polar or tube code.

#ifndef CONEFAN_TESTS_ORACLES_HPP
#define CONEFAN_TESTS_ORACLES_HPP

#include "conefan/conefan.hpp"

#include <random>

namespace oracle {

using conefan::Mat;
using conefan::Vec;

// Distance from x to cone(gens) by enumerating every generator subset of size
// <= n, solving unconstrained least squares on it and keeping nonnegative fits.
inline double subset_distance(const std::vector<Vec>& gens, const Vec& x) {
  const auto n = x.size();
  double best = x.norm();
  const std::size_t m = gens.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    if (std::popcount(mask) > n) continue;
    Mat a(n, std::popcount(mask));
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) a.col(c++) = gens[i];
    const Vec lam = a.colPivHouseholderQr().solve(x);
    if ((lam.array() < -1e-12).any()) continue;
    best = std::min(best, (a * lam - x).norm());
  }
  return best;
}

// Distance from x to cone(gens) by sampled minimization over cone points.
// Points are searched by ray: coefficients live on the simplex, the ray is
// their combination and the best point on it is max(0, u.x) u in closed form.
// Random start-up samples are followed by an adaptive local search.
// `budget` counts rays tried.
inline double sampled_distance(const std::vector<Vec>& gens, const Vec& x, std::size_t budget, std::uint64_t seed) {
  const std::size_t m = gens.size();
  if (m == 0) return x.norm();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat g(x.size(), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) g.col(static_cast<Eigen::Index>(i)) = gens[i];
  auto eval = [&](const Vec& lam) {
    const Vec r = g * lam;
    const double len = r.norm();
    if (len == 0.0) return x.norm();
    const Vec u = r / len;
    return (x - std::max(0.0, u.dot(x)) * u).norm();
  };
  auto normalize = [](Vec& lam) {
    const double s = lam.sum();
    if (s > 0.0) lam /= s;
  };

  Vec best = Vec::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  double best_val = std::min(x.norm(), eval(best));
  const std::size_t warmup = budget / 10;
  for (std::size_t s = 0; s < warmup; ++s) {
    Vec lam(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) lam(static_cast<Eigen::Index>(i)) = unit(rng) < 0.3 ? 0.0 : expo(rng);
    normalize(lam);
    const double v = eval(lam);
    if (v < best_val) {
      best_val = v;
      best = lam;
    }
  }
  double sigma = 0.3;
  for (std::size_t s = warmup; s < budget; ++s) {
    Vec lam = best;
    const bool single = unit(rng) < 0.5;
    const std::size_t only = static_cast<std::size_t>(unit(rng) * static_cast<double>(m)) % m;
    for (std::size_t i = 0; i < m; ++i) {
      if (single && i != only) continue;
      auto& l = lam(static_cast<Eigen::Index>(i));
      l = unit(rng) < 0.02 ? 0.0 : std::max(0.0, l + sigma * normal(rng));
    }
    normalize(lam);
    const double v = eval(lam);
    if (v < best_val) {
      best_val = v;
      best = lam;
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma *= 0.98;
      if (sigma < 1e-10) sigma = 0.3;  // restart the local search from the incumbent
    }
  }
  return best_val;
}

// u in polar(cone(gens)) by the definition, with a margin band treated as unknown.
enum class Side { inside, outside, boundary };
inline Side polar_side(const std::vector<Vec>& gens, const Vec& u, double margin = 1e-6) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& v : gens) worst = std::max(worst, u.dot(v));
  if (gens.empty()) return Side::inside;
  if (worst > margin) return Side::outside;
  if (worst < -margin) return Side::inside;
  return Side::boundary;
}

// Dense angular scan of sup dist(X, target) subject to dist(X, C_i) <= r_i in
// R^2, using subset_distance for every distance.
struct Term {
  std::vector<Vec> gens;
  double radius;
};
inline double dense_tube_sup_2d(const std::vector<Vec>& target, const std::vector<Term>& terms, std::size_t steps) {
  double best = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const double th = 2 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(steps);
    const Vec x = conefan::make_vec({std::cos(th), std::sin(th)});
    double gmax = 0.0;
    bool feasible = true;
    for (const auto& t : terms) {
      const double d = subset_distance(t.gens, x);
      if (t.radius > 0) {
        gmax = std::max(gmax, d / t.radius);
      } else if (d > 1e-10) {
        feasible = false;
      }
    }
    if (!feasible || gmax <= 1e-14) continue;
    best = std::max(best, subset_distance(target, x) / gmax);
  }
  return best;
}

inline std::vector<Vec> random_generators(std::mt19937_64& rng, Eigen::Index n, std::size_t count) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < count; ++i) {
    Vec v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = normal(rng);
    out.push_back(v);
  }
  return out;
}

inline Vec random_point(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(n);
  for (Eigen::Index j = 0; j < n; ++j) v(j) = normal(rng);
  return v;
}

}  // namespace oracle

#endif  // CONEFAN_TESTS_ORACLES_HPP
