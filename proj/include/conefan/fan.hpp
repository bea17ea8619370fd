// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_FAN_HPP
#define CONEFAN_FAN_HPP

#include "conefan/cone.hpp"

#include <numeric>
#include <optional>
#include <random>

namespace conefan {

enum class Completeness {
  unknown,    // not checked
  certified,  // exact (hyperplane-generated fans)
  sampled,    // no counterexample among sampled directions
  refuted,    // a direction outside every maximal cone was found
};

inline const char* to_string(Completeness c) {
  switch (c) {
    case Completeness::unknown: return "unknown";
    case Completeness::certified: return "certified";
    case Completeness::sampled: return "sampled";
    case Completeness::refuted: return "refuted";
  }
  return "unknown";
}

/// A polyhedral fan stored closed under faces.
///
/// Cones keep the order they were given in; per-dimension index lists, the
/// polar of every cone and the cone-inclusion relation are precomputed.
class Fan {
 public:
  /// Builds a fan from cones already known to satisfy the fan axioms.
  static Fan trusted(Eigen::Index n, std::vector<Cone> cones, Completeness completeness) {
    return Fan(n, std::move(cones), completeness);
  }

  Eigen::Index ambient_dim() const { return ambient_dim_; }
  std::size_t size() const { return cones_.size(); }
  const std::vector<Cone>& cones() const { return cones_; }
  const Cone& cone(ConeIndex i) const { return cones_.at(i); }
  const Cone& polar_of(ConeIndex i) const { return polars_.at(i); }

  const std::vector<ConeIndex>& cones_of_dim(Eigen::Index k) const {
    static const std::vector<ConeIndex> none;
    if (k < 0 || k > ambient_dim_) return none;
    return by_dim_[static_cast<std::size_t>(k)];
  }
  const std::vector<ConeIndex>& maximal() const { return cones_of_dim(ambient_dim_); }

  Completeness completeness() const { return completeness_; }
  bool complete() const {
    return completeness_ == Completeness::certified || completeness_ == Completeness::sampled;
  }

  /// cone(i) ⊆ cone(j)
  bool is_subcone(ConeIndex i, ConeIndex j) const { return subcone_[i * cones_.size() + j] != 0; }

  std::optional<ConeIndex> find(const Cone& c, double tol = tolerance()) const {
    for (ConeIndex i : cones_of_dim(c.dim()))
      if (cone_equal(cones_[i], c, tol)) return i;
    return std::nullopt;
  }

  /// The largest fan cone contained in every listed cone. In a valid fan this
  /// is their intersection.
  ConeIndex largest_common_face(std::span<const ConeIndex> members) const {
    for (Eigen::Index k = ambient_dim_; k >= 0; --k) {
      for (ConeIndex c : cones_of_dim(k)) {
        bool inside = std::all_of(members.begin(), members.end(),
                                  [&](ConeIndex m) { return is_subcone(c, m); });
        if (inside) return c;
      }
    }
    throw FanInvariantError("fan has no cone common to the given members");
  }

  /// Fan with cones listed as new[i] = old[perm[i]].
  Fan reordered(std::span<const ConeIndex> perm) const {
    if (perm.size() != cones_.size()) throw InputError("reordered: permutation size mismatch");
    std::vector<Cone> cs;
    cs.reserve(perm.size());
    for (ConeIndex p : perm) cs.push_back(cones_.at(p));
    return Fan(ambient_dim_, std::move(cs), completeness_);
  }

 private:
  Fan(Eigen::Index n, std::vector<Cone> cones, Completeness completeness)
      : ambient_dim_(n), cones_(std::move(cones)), completeness_(completeness) {
    by_dim_.resize(static_cast<std::size_t>(n + 1));
    polars_.reserve(cones_.size());
    for (ConeIndex i = 0; i < cones_.size(); ++i) {
      if (cones_[i].ambient_dim() != n) throw InputError("fan: cone with wrong ambient dimension");
      by_dim_[static_cast<std::size_t>(cones_[i].dim())].push_back(i);
      polars_.push_back(polar(cones_[i]));
    }
    const std::size_t m = cones_.size();
    subcone_.assign(m * m, 0);
    for (ConeIndex i = 0; i < m; ++i)
      for (ConeIndex j = 0; j < m; ++j)
        subcone_[i * m + j] = (cones_[i].dim() <= cones_[j].dim() && cone_contains_cone(cones_[j], cones_[i])) ? 1 : 0;
  }

  Eigen::Index ambient_dim_;
  std::vector<Cone> cones_;
  std::vector<Cone> polars_;
  std::vector<std::vector<ConeIndex>> by_dim_;
  std::vector<char> subcone_;
  Completeness completeness_;
};

struct FanViolation {
  enum class Kind { missing_face, bad_intersection };
  Kind kind;
  ConeIndex first = 0;
  std::optional<ConeIndex> second;
  Cone witness;  // the missing face, or the offending intersection
  std::string message;
};

struct FanValidation {
  std::optional<Fan> fan;
  std::vector<FanViolation> violations;
  bool ok() const { return fan.has_value(); }
};

struct CompletenessReport {
  bool complete = true;
  std::size_t samples = 0;
  std::optional<Vec> witness;
};

namespace detail {

inline Vec random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace detail

/// Checks that random unit directions each fall in some maximal cone.
inline CompletenessReport is_complete(const Fan& f, std::size_t samples, std::uint64_t seed = 0) {
  CompletenessReport r;
  std::mt19937_64 rng(seed);
  const Eigen::Index n = f.ambient_dim();
  if (n == 0) return r;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec u = detail::random_unit(rng, n);
    ++r.samples;
    const bool covered = std::any_of(f.maximal().begin(), f.maximal().end(),
                                     [&](ConeIndex i) { return f.cone(i).contains(u); });
    if (!covered) {
      r.complete = false;
      r.witness = u;
      return r;
    }
  }
  return r;
}

struct ValidateOptions {
  std::size_t completeness_samples = 100000;
  std::uint64_t seed = 0;
};

/// Verifies face closure and pairwise face intersection. Missing faces are
/// reported, never added.
inline FanValidation validate_fan(const std::vector<Cone>& input, const ValidateOptions& opts = {}) {
  FanValidation out;
  if (input.empty()) throw InputError("validate_fan: no cones given");
  const Eigen::Index n = input.front().ambient_dim();
  std::vector<Cone> cones;
  for (const auto& c : input) {
    if (c.ambient_dim() != n) throw InputError("validate_fan: cones have different ambient dimensions");
    bool dup = std::any_of(cones.begin(), cones.end(), [&](const Cone& d) { return cone_equal(c, d); });
    if (!dup) cones.push_back(c);
  }

  auto index_of = [&](const Cone& c) -> std::optional<ConeIndex> {
    for (ConeIndex i = 0; i < cones.size(); ++i)
      if (cone_equal(cones[i], c)) return i;
    return std::nullopt;
  };

  // faces_by_dim[i][k] = k-faces of cone i
  std::vector<std::vector<std::vector<Cone>>> face_cache(cones.size());
  for (ConeIndex i = 0; i < cones.size(); ++i) {
    face_cache[i].resize(static_cast<std::size_t>(cones[i].dim() + 1));
    for (Eigen::Index k = 0; k <= cones[i].dim(); ++k)
      face_cache[i][static_cast<std::size_t>(k)] = faces(cones[i], k);
  }

  for (ConeIndex i = 0; i < cones.size(); ++i) {
    for (Eigen::Index k = 0; k < cones[i].dim(); ++k) {
      for (const auto& face : face_cache[i][static_cast<std::size_t>(k)]) {
        if (!index_of(face)) {
          std::ostringstream msg;
          msg << "cone " << i << " has a " << k << "-dimensional face that is not in the fan";
          out.violations.push_back({FanViolation::Kind::missing_face, i, std::nullopt, face, msg.str()});
        }
      }
    }
  }

  auto is_face_of = [&](const Cone& sub, ConeIndex i) {
    if (sub.dim() > cones[i].dim()) return false;
    const auto& candidates = face_cache[i][static_cast<std::size_t>(sub.dim())];
    return std::any_of(candidates.begin(), candidates.end(), [&](const Cone& f) { return cone_equal(f, sub); });
  };

  for (ConeIndex i = 0; i < cones.size(); ++i) {
    for (ConeIndex j = i + 1; j < cones.size(); ++j) {
      Cone meet = intersect(cones[i], cones[j]);
      if (!is_face_of(meet, i) || !is_face_of(meet, j)) {
        std::ostringstream msg;
        msg << "intersection of cones " << i << " and " << j << " (dimension " << meet.dim()
            << ") is not a face of both";
        out.violations.push_back({FanViolation::Kind::bad_intersection, i, j, std::move(meet), msg.str()});
      }
    }
  }

  if (!out.violations.empty()) return out;
  Fan fan = Fan::trusted(n, std::move(cones), Completeness::unknown);
  const auto report = is_complete(fan, opts.completeness_samples, opts.seed);
  const Completeness c = report.complete ? Completeness::sampled : Completeness::refuted;
  std::vector<Cone> cs = fan.cones();
  out.fan = Fan::trusted(n, std::move(cs), c);
  return out;
}

/// All faces of the given cones, deduplicated, ordered by dimension.
inline std::vector<Cone> close_under_faces(const std::vector<Cone>& cones) {
  std::vector<Cone> out;
  for (const auto& c : cones) {
    for (Eigen::Index k = 0; k <= c.dim(); ++k) {
      for (auto& f : faces(c, k)) {
        bool dup = std::any_of(out.begin(), out.end(), [&](const Cone& d) { return cone_equal(f, d); });
        if (!dup) out.push_back(std::move(f));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Cone& a, const Cone& b) { return a.dim() < b.dim(); });
  return out;
}

inline constexpr std::size_t kMaxHyperplanes = 12;

/// The complete fan cut out by central hyperplanes {x : a.x = 0}.
///
/// Sign vectors in {-,0,+}^k are enumerated depth-first; a prefix is extended
/// only if some point realizes it exactly, so empty cells are pruned early.
inline Fan hyperplane_fan(const std::vector<Vec>& normals, Eigen::Index n = -1) {
  if (n < 0) {
    if (normals.empty()) throw InputError("hyperplane_fan: ambient dimension unknown (no normals)");
    n = normals.front().size();
  }
  std::vector<Vec> hs;
  for (const auto& a : normals) {
    if (a.size() != n) throw InputError("hyperplane_fan: normals have different lengths");
    const double len = a.norm();
    if (len <= tolerance()) throw InputError("hyperplane_fan: zero normal");
    Vec u = a / len;
    bool dup = std::any_of(hs.begin(), hs.end(), [&](const Vec& h) { return std::abs(std::abs(h.dot(u)) - 1.0) <= 1e-12; });
    if (!dup) hs.push_back(u);
  }
  if (hs.size() > kMaxHyperplanes) {
    std::ostringstream msg;
    msg << "hyperplane_fan: " << hs.size() << " distinct hyperplanes exceeds the limit of " << kMaxHyperplanes;
    throw InputError(msg.str());
  }

  std::vector<Cone> cells;
  std::vector<Vec> rows;
  std::vector<int> signs;

  auto realized = [&](const Cone& cell) {
    const Vec p = cell.relative_interior_point();
    const double s = std::max(1.0, p.norm());
    for (std::size_t j = 0; j < signs.size(); ++j) {
      const double v = hs[j].dot(p);
      const int sg = v > 1e-9 * s ? 1 : (v < -1e-9 * s ? -1 : 0);
      if (sg != signs[j]) return false;
    }
    return true;
  };

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == hs.size()) {
      cells.push_back(polar(Cone::from_generators(rows, n)));
      return;
    }
    for (int s : {-1, 0, 1}) {
      const std::size_t mark = rows.size();
      if (s >= 0) rows.push_back(-hs[depth]);
      if (s <= 0) rows.push_back(hs[depth]);
      signs.push_back(s);
      const Cone cell = polar(Cone::from_generators(rows, n));
      if (realized(cell)) self(self, depth + 1);
      signs.pop_back();
      rows.resize(mark);
    }
  };
  recurse(recurse, 0);

  std::stable_sort(cells.begin(), cells.end(), [](const Cone& a, const Cone& b) { return a.dim() < b.dim(); });
  return Fan::trusted(n, std::move(cells), Completeness::certified);
}

struct FanMember {
  ConeIndex index;
  Cone cone;
};

/// ∩ of the listed cones, located in the fan.
inline FanMember intersect_in_fan(const Fan& f, std::span<const ConeIndex> indices) {
  if (indices.empty()) throw InputError("intersect_in_fan: empty index set");
  Cone acc = f.cone(indices.front());
  for (std::size_t k = 1; k < indices.size(); ++k) acc = intersect(acc, f.cone(indices[k]));
  const auto idx = f.find(acc);
  if (!idx) throw FanInvariantError("intersect_in_fan: intersection is not a cone of the fan");
  return {*idx, f.cone(*idx)};
}

inline FanMember intersect_in_fan(const Fan& f, std::initializer_list<ConeIndex> indices) {
  return intersect_in_fan(f, std::span<const ConeIndex>(indices.begin(), indices.size()));
}

/// Images of all fan cones under the orthogonal projection onto span(kernel)^⊥.
inline std::vector<Cone> project_fan(const Fan& f, const std::vector<Vec>& kernel_basis) {
  const Eigen::Index n = f.ambient_dim();
  const Mat k = linalg::column_basis(linalg::stack_columns(kernel_basis, n));
  const Mat proj = Mat::Identity(n, n) - k * k.transpose();
  std::vector<Cone> out;
  out.reserve(f.size());
  for (const auto& c : f.cones()) {
    std::vector<Vec> imgs;
    for (const auto& g : c.generators()) imgs.emplace_back(proj * g);
    out.push_back(Cone::from_generators(imgs, n));
  }
  return out;
}

}  // namespace conefan

#endif  // CONEFAN_FAN_HPP
