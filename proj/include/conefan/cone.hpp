// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_CONE_HPP
#define CONEFAN_CONE_HPP

#include "conefan/common.hpp"
#include "conefan/nnls.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace conefan {

/// A convex polyhedral cone C = { sum lambda_i v_i : lambda_i >= 0 } in R^n.
///
/// Both representations are kept: unit, deduplicated, irredundant generators
/// and one supporting halfspace a.x <= 0 per facet. The halfspaces describe C
/// only together with the linear span S(C):  C = S(C) ∩ {x : a.x <= 0 ∀a}.
/// Instances are immutable; build them with from_generators().
class Cone {
 public:
  Cone() : ambient_dim_(0), span_basis_(0, 0) {}

  static Cone zero(Eigen::Index n) {
    Cone c;
    c.ambient_dim_ = n;
    c.span_basis_ = Mat(n, 0);
    c.generator_matrix_ = Mat(n, 0);
    return c;
  }

  static Cone from_generators(std::span<const Vec> rays, Eigen::Index n, double tol = tolerance());

  static Cone from_generators(const std::vector<Vec>& rays, Eigen::Index n, double tol = tolerance()) {
    return from_generators(std::span<const Vec>(rays), n, tol);
  }

  /// The whole space R^n, generated by ±e_i.
  static Cone whole_space(Eigen::Index n) {
    std::vector<Vec> rays;
    for (Eigen::Index i = 0; i < n; ++i) {
      rays.push_back(Vec::Unit(n, i));
      rays.push_back(-Vec::Unit(n, i));
    }
    return from_generators(rays, n);
  }

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  Eigen::Index dim() const { return span_basis_.cols(); }
  bool is_zero() const { return generators_.empty(); }

  const std::vector<Vec>& generators() const { return generators_; }
  /// Facet normals a with a.x <= 0 on the cone; each lies in S(C).
  const std::vector<Vec>& halfspaces() const { return halfspaces_; }
  /// Orthonormal basis of S(C), one column per dimension.
  const Mat& span_basis() const { return span_basis_; }

  /// Membership within tolerance scaled by max(1, |x|).
  bool contains(const Vec& x, double tol = tolerance()) const {
    const double s = std::max(1.0, x.norm());
    if (dim() < ambient_dim_) {
      const Vec off = x - span_basis_ * (span_basis_.transpose() * x);
      if (off.norm() > tol * s) return false;
    }
    for (const auto& a : halfspaces_)
      if (a.dot(x) > tol * s) return false;
    return true;
  }

  /// A point of the relative interior (the sum of the generators).
  Vec relative_interior_point() const {
    Vec p = Vec::Zero(ambient_dim_);
    for (const auto& g : generators_) p += g;
    return p;
  }

  /// Generators as the columns of an n x m matrix.
  const Mat& generator_matrix() const { return generator_matrix_; }

 private:
  Eigen::Index ambient_dim_;
  std::vector<Vec> generators_;
  std::vector<Vec> halfspaces_;
  Mat span_basis_;
  Mat generator_matrix_;
};

namespace detail {

// Calls fn(indices) for every k-subset of {0..m-1} in lexicographic order.
template <class Fn>
void for_each_combination(std::size_t m, std::size_t k, Fn&& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(std::as_const(idx));
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline bool near_duplicate(const std::vector<Vec>& pool, const Vec& v, double tol) {
  return std::any_of(pool.begin(), pool.end(), [&](const Vec& w) { return (w - v).norm() <= tol; });
}

// Facet normals of a full-dimensional cone in R^d given by the columns of w.
inline std::vector<Vec> facet_normals_full_dim(const Mat& w, double tol) {
  const auto d = static_cast<std::size_t>(w.rows());
  const auto m = static_cast<std::size_t>(w.cols());
  std::vector<Vec> normals;
  for_each_combination(m, d - 1, [&](const std::vector<std::size_t>& subset) {
    Mat rows(static_cast<Eigen::Index>(subset.size()), w.rows());
    for (std::size_t i = 0; i < subset.size(); ++i)
      rows.row(static_cast<Eigen::Index>(i)) = w.col(static_cast<Eigen::Index>(subset[i])).transpose();
    const Mat ns = linalg::null_space(rows);
    if (ns.cols() != 1) return;
    Vec a = ns.col(0);
    const Vec s = w.transpose() * a;
    if (s.maxCoeff() <= tol) {
      // already outward
    } else if (s.minCoeff() >= -tol) {
      a = -a;
    } else {
      return;
    }
    if (!near_duplicate(normals, a, 1e-8)) normals.push_back(a);
  });
  return normals;
}

}  // namespace detail

inline Cone Cone::from_generators(std::span<const Vec> rays, Eigen::Index n, double tol) {
  if (n < 0) throw InputError("cone: negative ambient dimension");
  std::vector<Vec> unit;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].size() != n) {
      std::ostringstream msg;
      msg << "cone: generator " << i << " has length " << rays[i].size() << ", expected " << n;
      throw InputError(msg.str());
    }
    const double len = rays[i].norm();
    if (!std::isfinite(len)) throw InputError("cone: non-finite generator");
    if (len <= tol) continue;
    Vec u = rays[i] / len;
    if (!detail::near_duplicate(unit, u, 1e-9)) unit.push_back(std::move(u));
  }
  Cone c = zero(n);
  if (unit.empty()) return c;

  // Drop generators already in the cone of the remaining ones.
  for (std::size_t i = 0; i < unit.size();) {
    std::vector<Vec> others;
    for (std::size_t j = 0; j < unit.size(); ++j)
      if (j != i) others.push_back(unit[j]);
    const Mat a = linalg::stack_columns(others, n);
    if (!others.empty() && nnls(a, unit[i]).residual_norm <= std::max(tol, 1e-12)) {
      unit.erase(unit.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }

  const Mat v = linalg::stack_columns(unit, n);
  c.span_basis_ = linalg::column_basis(v);
  c.generator_matrix_ = v;
  c.generators_ = std::move(unit);
  const Mat w = c.span_basis_.transpose() * v;
  for (const auto& a : detail::facet_normals_full_dim(w, 1e-10)) {
    Vec lifted = c.span_basis_ * a;
    lifted.normalize();
    c.halfspaces_.push_back(std::move(lifted));
  }
  return c;
}

struct ProjectionResult {
  Vec nearest_point;
  double distance = 0.0;
  Eigen::Index active_face_dim = 0;
};

namespace detail {

// Generators of `c` lying on every facet hyperplane active at `p`.
inline std::vector<Vec> minimal_face_generators(const Cone& c, const Vec& p, double tol) {
  const double s = std::max(1.0, p.norm());
  std::vector<const Vec*> active;
  for (const auto& a : c.halfspaces())
    if (std::abs(a.dot(p)) <= tol * s) active.push_back(&a);
  std::vector<Vec> on_face;
  for (const auto& g : c.generators()) {
    bool ok = true;
    for (const Vec* a : active)
      if (std::abs(a->dot(g)) > 1e-9) ok = false;
    if (ok) on_face.push_back(g);
  }
  return on_face;
}

// Orthonormal basis of the span of the smallest face of `c` containing `p`.
inline Mat minimal_face_basis(const Cone& c, const Vec& p, double tol = tolerance()) {
  const auto gens = minimal_face_generators(c, p, tol);
  return linalg::column_basis(linalg::stack_columns(gens, c.ambient_dim()));
}

}  // namespace detail

/// Metric projection of x onto c by nonnegative least squares over the generators.
inline ProjectionResult project_point(const Cone& c, const Vec& x) {
  if (x.size() != c.ambient_dim()) throw InputError("project_point: dimension mismatch");
  ProjectionResult r;
  if (c.is_zero()) {
    r.nearest_point = Vec::Zero(x.size());
    r.distance = x.norm();
    return r;
  }
  const auto sol = nnls(c.generator_matrix(), x);
  r.nearest_point = sol.fitted;
  r.distance = sol.residual_norm;
  r.active_face_dim = detail::minimal_face_basis(c, r.nearest_point).cols();
  return r;
}

inline double distance(const Cone& c, const Vec& x) {
  if (c.is_zero()) return x.norm();
  if (c.contains(x, 1e-13)) return 0.0;
  return nnls(c.generator_matrix(), x).residual_norm;
}

/// The polar cone {u : u.x <= 0 for all x in c} = S(c)^⊥ + cone(facet normals).
inline Cone polar(const Cone& c) {
  const Eigen::Index n = c.ambient_dim();
  std::vector<Vec> gens;
  const Mat perp = linalg::orthogonal_complement(c.span_basis(), n);
  for (Eigen::Index j = 0; j < perp.cols(); ++j) {
    gens.emplace_back(perp.col(j));
    gens.emplace_back(-perp.col(j));
  }
  for (const auto& a : c.halfspaces()) gens.push_back(a);
  return Cone::from_generators(gens, n);
}

/// Facet halfspaces H̃_σ (a.x <= 0), one per facet, restricted to S(c).
inline const std::vector<Vec>& halfspace_representation(const Cone& c) { return c.halfspaces(); }

inline bool cone_contains_cone(const Cone& outer, const Cone& inner, double tol = tolerance()) {
  if (outer.ambient_dim() != inner.ambient_dim()) throw InputError("cone_contains_cone: dimension mismatch");
  return std::all_of(inner.generators().begin(), inner.generators().end(),
                     [&](const Vec& g) { return outer.contains(g, tol); });
}

inline bool cone_equal(const Cone& a, const Cone& b, double tol = tolerance()) {
  return a.dim() == b.dim() && cone_contains_cone(a, b, tol) && cone_contains_cone(b, a, tol);
}

/// a ∩ b, computed as the polar of a° + b°.
inline Cone intersect(const Cone& a, const Cone& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw InputError("intersect: dimension mismatch");
  const Cone pa = polar(a);
  const Cone pb = polar(b);
  std::vector<Vec> gens = pa.generators();
  gens.insert(gens.end(), pb.generators().begin(), pb.generators().end());
  return polar(Cone::from_generators(gens, a.ambient_dim()));
}

/// All distinct k-dimensional faces of c.
///
/// Faces are tracked as subsets of c's generators; the facets of a face F are
/// cut out by F's own facet hyperplanes.
inline std::vector<Cone> faces(const Cone& c, Eigen::Index k) {
  if (k < 0 || k > c.dim()) {
    std::ostringstream msg;
    msg << "faces: k = " << k << " outside [0, " << c.dim() << "]";
    throw InputError(msg.str());
  }
  const auto& gens = c.generators();
  const Eigen::Index n = c.ambient_dim();
  auto build = [&](const std::vector<char>& mask) {
    std::vector<Vec> sub;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (mask[i]) sub.push_back(gens[i]);
    return Cone::from_generators(sub, n);
  };

  std::vector<std::pair<std::vector<char>, Cone>> level;
  level.emplace_back(std::vector<char>(gens.size(), 1), c);
  Eigen::Index d = c.dim();
  while (d > k) {
    std::set<std::vector<char>> seen;
    std::vector<std::pair<std::vector<char>, Cone>> next;
    for (const auto& [mask, face] : level) {
      for (const auto& a : face.halfspaces()) {
        std::vector<char> sub(gens.size(), 0);
        for (std::size_t i = 0; i < gens.size(); ++i)
          if (mask[i] && std::abs(a.dot(gens[i])) <= 1e-9) sub[i] = 1;
        if (!seen.insert(sub).second) continue;
        Cone f = build(sub);
        if (f.dim() == d - 1) next.emplace_back(std::move(sub), std::move(f));
      }
    }
    if (next.empty()) return {};
    level = std::move(next);
    --d;
  }
  std::vector<Cone> out;
  out.reserve(level.size());
  for (auto& entry : level) out.push_back(std::move(entry.second));
  return out;
}

inline std::vector<Cone> facets(const Cone& c) {
  if (c.dim() == 0) return {};
  return faces(c, c.dim() - 1);
}

/// Dimension of the smallest face (the lineality space of c).
inline Eigen::Index lineality_dim(const Cone& c) {
  if (c.is_zero()) return 0;
  return detail::minimal_face_basis(c, Vec::Zero(c.ambient_dim())).cols();
}

}  // namespace conefan

#endif  // CONEFAN_CONE_HPP
