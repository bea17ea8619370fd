// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_TUBE_HPP
#define CONEFAN_TUBE_HPP

#include "conefan/cone.hpp"

#include <limits>
#include <numbers>
#include <random>

namespace conefan {

/// Constraint dist(X, cone) <= radius. A zero radius means X ∈ cone.
struct TubeTerm {
  const Cone* cone;
  double radius;
};

/// sup { dist(X, target) : dist(X, C_i) <= r_i for all i }.
struct TubeSup {
  double value = 0.0;
  Vec witness;  // a feasible X attaining `value` (empty if none was found)
  bool exact = false;
  bool unbounded = false;
};

struct TubeSearchOptions {
  std::size_t samples = 10000;
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
};

namespace detail {

// The problem is positively homogeneous, so it is solved over unit
// directions x:  value(x) = dist(x, target) / max_i dist(x, C_i) / r_i,
// attained at X = x / max_i(...).
class TubeObjective {
 public:
  TubeObjective(const Cone& target, std::span<const TubeTerm> terms) : target_(target), terms_(terms) {}

  struct Eval {
    bool feasible = false;
    bool unbounded = false;
    double value = -std::numeric_limits<double>::infinity();
    Vec point;
  };

  Eval operator()(const Vec& x) const {
    Eval e;
    double g = 0.0;
    for (const auto& t : terms_) {
      const double d = distance(*t.cone, x);
      if (t.radius > 0.0) {
        g = std::max(g, d / t.radius);
      } else if (d > 1e-10 * std::max(1.0, x.norm())) {
        return e;
      }
    }
    const double f = distance(target_, x);
    if (g <= 1e-14) {
      if (f > 1e-9 * std::max(1.0, x.norm())) {
        e.feasible = true;
        e.unbounded = true;
        e.value = std::numeric_limits<double>::infinity();
        e.point = x;
      }
      return e;
    }
    e.feasible = true;
    e.value = f / g;
    e.point = x / g;
    return e;
  }

  const Cone& target() const { return target_; }
  std::span<const TubeTerm> terms() const { return terms_; }

 private:
  const Cone& target_;
  std::span<const TubeTerm> terms_;
};

inline void keep_best(TubeSup& best, const TubeObjective::Eval& e) {
  if (!e.feasible) return;
  if (e.unbounded) {
    best.unbounded = true;
    best.value = std::numeric_limits<double>::infinity();
    best.witness = e.point;
    return;
  }
  if (!best.unbounded && (best.witness.size() == 0 || e.value > best.value)) {
    best.value = e.value;
    best.witness = e.point;
  }
}

inline Vec direction(double theta) { return make_vec({std::cos(theta), std::sin(theta)}); }

inline double angle_of(const Vec& v) {
  double a = std::atan2(v(1), v(0));
  if (a < 0) a += 2 * std::numbers::pi;
  return a;
}

// Projector onto the orthogonal complement of the face of `c` nearest to x.
// Within one region of the nearest-face decomposition dist(x, c) = |P x|.
inline Mat nearest_face_complement(const Cone& c, const Vec& x) {
  const Eigen::Index n = c.ambient_dim();
  if (c.is_zero()) return Mat::Identity(n, n);
  const auto proj = project_point(c, x);
  if (proj.distance <= 1e-12) return Mat::Zero(n, n);
  const Mat f = minimal_face_basis(c, proj.nearest_point);
  return Mat::Identity(n, n) - f * f.transpose();
}

// q(θ) = x(θ)ᵀ M x(θ) written as p + u cos 2θ + v sin 2θ.
struct TrigForm {
  double p, u, v;
};

inline TrigForm trig_form(const Mat& m) {
  return {(m(0, 0) + m(1, 1)) / 2, (m(0, 0) - m(1, 1)) / 2, (m(0, 1) + m(1, 0)) / 2};
}

// Angles θ ∈ [0, 2π) with k + a cos 2θ + b sin 2θ = 0.
inline void trig_roots(double k, double a, double b, std::vector<double>& out) {
  const double r = std::hypot(a, b);
  if (r < 1e-15) return;
  const double c = -k / r;
  if (c < -1.0 - 1e-12 || c > 1.0 + 1e-12) return;
  const double psi = std::atan2(b, a);
  const double delta = std::acos(std::clamp(c, -1.0, 1.0));
  for (double phi : {psi + delta, psi - delta}) {
    for (int shift = 0; shift < 2; ++shift) {
      double theta = phi / 2 + shift * std::numbers::pi;
      theta = std::fmod(theta, 2 * std::numbers::pi);
      if (theta < 0) theta += 2 * std::numbers::pi;
      out.push_back(theta);
    }
  }
}

inline void collect_breakpoints(const Cone& c, std::vector<double>& out) {
  const double quarter = std::numbers::pi / 2;
  for (const auto& g : c.generators()) {
    const double a = angle_of(g);
    for (double t : {a, a + quarter, a - quarter}) out.push_back(t);
  }
  for (const auto& h : c.halfspaces()) {
    const double a = angle_of(h);
    for (double t : {a, a + quarter, a - quarter}) out.push_back(t);
  }
}

// Exact maximization in R^2. Breakpoints split the circle into arcs on which
// every nearest face is fixed, so each distance squared is a quadratic form
// in (cos θ, sin θ). On an arc the objective is sqrt(q0 / q_i) for the active
// term i; its maximum sits at an arc end, a switch point q_i = q_j, or a
// stationary point of q0 / q_i. All three reduce to k + a cos 2θ + b sin 2θ = 0.
inline TubeSup solve_exact_2d(const TubeObjective& obj) {
  TubeSup best;
  best.exact = true;
  std::vector<double> bps;
  collect_breakpoints(obj.target(), bps);
  for (const auto& t : obj.terms()) collect_breakpoints(*t.cone, bps);
  bps.push_back(0.0);
  for (auto& t : bps) {
    t = std::fmod(t, 2 * std::numbers::pi);
    if (t < 0) t += 2 * std::numbers::pi;
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end(), [](double a, double b) { return b - a < 1e-15; }), bps.end());

  for (double t : bps) keep_best(best, obj(direction(t)));

  const std::size_t nb = bps.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const double lo = bps[i];
    const double hi = (i + 1 < nb) ? bps[i + 1] : bps[0] + 2 * std::numbers::pi;
    if (hi - lo < 1e-13) continue;
    const double mid = (lo + hi) / 2;
    const Vec xm = direction(mid);
    keep_best(best, obj(xm));

    std::vector<TrigForm> forms;
    bool feasible_arc = true;
    for (const auto& t : obj.terms()) {
      const Mat p = nearest_face_complement(*t.cone, xm);
      if (t.radius > 0.0) {
        forms.push_back(trig_form(p / (t.radius * t.radius)));
      } else if (p.norm() > 0.0) {
        feasible_arc = false;
      }
    }
    if (!feasible_arc) continue;
    const TrigForm q0 = trig_form(nearest_face_complement(obj.target(), xm));

    std::vector<double> cands;
    for (std::size_t a = 0; a < forms.size(); ++a) {
      const auto& qi = forms[a];
      trig_roots(q0.v * qi.u - q0.u * qi.v, q0.v * qi.p - q0.p * qi.v, q0.p * qi.u - q0.u * qi.p, cands);
      for (std::size_t b = a + 1; b < forms.size(); ++b) {
        const auto& qj = forms[b];
        trig_roots(qi.p - qj.p, qi.u - qj.u, qi.v - qj.v, cands);
      }
    }
    for (double th : cands) {
      double t = th;
      if (t < lo) t += 2 * std::numbers::pi;
      if (t >= lo && t <= hi) keep_best(best, obj(direction(t)));
    }
  }
  return best;
}

inline TubeSup solve_exact_1d(const TubeObjective& obj) {
  TubeSup best;
  best.exact = true;
  for (double s : {1.0, -1.0}) keep_best(best, obj(make_vec({s})));
  return best;
}

// Pattern search on the unit sphere from x.
inline TubeObjective::Eval polish(const TubeObjective& obj, Vec x, TubeObjective::Eval cur) {
  const Eigen::Index n = x.size();
  double step = 0.05;
  for (int iter = 0; iter < 4000 && step > 1e-10; ++iter) {
    const Mat tangent = linalg::orthogonal_complement(x, n);
    bool improved = false;
    for (Eigen::Index j = 0; j < tangent.cols() && !improved; ++j) {
      for (double sgn : {1.0, -1.0}) {
        Vec y = x + sgn * step * tangent.col(j);
        y.normalize();
        auto e = obj(y);
        if (e.feasible && e.value > cur.value) {
          x = y;
          cur = std::move(e);
          improved = true;
          break;
        }
      }
    }
    if (cur.unbounded) break;
    if (improved) {
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return cur;
}

inline void structured_directions(const Cone& c, std::vector<Vec>& out) {
  for (const auto& g : c.generators()) {
    out.push_back(g);
    out.push_back(-g);
  }
  for (const auto& h : c.halfspaces()) {
    out.push_back(h);
    out.push_back(-h);
  }
  if (!c.is_zero()) {
    Vec p = c.relative_interior_point();
    if (p.norm() > 1e-12) out.push_back(p.normalized());
  }
}

// Sampled lower bound with local refinement, for ambient dimension >= 3.
inline TubeSup solve_sampled(const TubeObjective& obj, const TubeSearchOptions& opts) {
  const Eigen::Index n = obj.target().ambient_dim();
  std::vector<Vec> dirs;
  structured_directions(obj.target(), dirs);
  for (const auto& t : obj.terms()) structured_directions(*t.cone, dirs);
  {
    const std::size_t base = dirs.size();
    for (std::size_t i = 0; i < base; ++i)
      for (std::size_t j = i + 1; j < base; ++j) {
        Vec s = dirs[i] + dirs[j];
        if (s.norm() > 1e-9) dirs.push_back(s.normalized());
      }
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t s = 0; s < opts.samples; ++s) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    if (v.norm() > 1e-12) dirs.push_back(v.normalized());
  }

  std::vector<std::pair<double, std::size_t>> ranked;
  TubeSup best;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    auto e = obj(dirs[i]);
    keep_best(best, e);
    if (best.unbounded) return best;
    if (e.feasible) ranked.emplace_back(e.value, i);
  }
  const std::size_t k = std::min(opts.restarts, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; r < k; ++r) {
    const Vec& x = dirs[ranked[r].second];
    keep_best(best, polish(obj, x, obj(x)));
  }
  best.exact = false;
  return best;
}

}  // namespace detail

/// Supremum of dist(X, target) over the intersection of tubes around the
/// term cones. Exact for ambient dimension <= 2; a sampled lower bound with
/// local refinement otherwise (TubeSup::exact tells which).
inline TubeSup tube_sup(const Cone& target, std::span<const TubeTerm> terms, const TubeSearchOptions& opts = {}) {
  const Eigen::Index n = target.ambient_dim();
  for (const auto& t : terms) {
    if (t.cone->ambient_dim() != n) throw InputError("tube_sup: dimension mismatch");
    if (!(t.radius >= 0.0)) throw InputError("tube_sup: negative radius");
  }
  const detail::TubeObjective obj(target, terms);
  if (n == 0) return TubeSup{0.0, Vec(0), true, false};
  if (n == 1) return detail::solve_exact_1d(obj);
  if (n == 2) return detail::solve_exact_2d(obj);
  return detail::solve_sampled(obj, opts);
}

inline TubeSup tube_sup(const Cone& target, std::initializer_list<TubeTerm> terms, const TubeSearchOptions& opts = {}) {
  return tube_sup(target, std::span<const TubeTerm>(terms.begin(), terms.size()), opts);
}

}  // namespace conefan

#endif  // CONEFAN_TUBE_HPP
