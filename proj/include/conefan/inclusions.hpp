// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_INCLUSIONS_HPP
#define CONEFAN_INCLUSIONS_HPP

#include "conefan/fan.hpp"
#include "conefan/tube.hpp"

#include <array>
#include <optional>
#include <sstream>

namespace conefan {

/// Two cones of the same dimension passed the distance test at one step.
class AmbiguityError : public Error {
 public:
  AmbiguityError(Eigen::Index step, ConeIndex first, ConeIndex second, Vec point)
      : Error(describe(step, first, second)), step_(step), first_(first), second_(second), point_(std::move(point)) {}

  Eigen::Index step() const { return step_; }
  ConeIndex first() const { return first_; }
  ConeIndex second() const { return second_; }
  const Vec& point() const { return point_; }

 private:
  static std::string describe(Eigen::Index step, ConeIndex a, ConeIndex b) {
    std::ostringstream s;
    s << "ambiguous at step " << step << ": cones " << a << " and " << b << " both qualify";
    return s.str();
  }
  Eigen::Index step_;
  ConeIndex first_, second_;
  Vec point_;
};

/// Right-hand side F(X) = polar of a fan cone.
struct InclusionRHS {
  Cone cone;
  ConeIndex source_cone_index = 0;
  Eigen::Index step = 0;  // QTDI step; ambient_dim + 1 for TDI
};

struct WellDefinedness {
  enum class Status { unchecked, certified, refuted };
  Status status = Status::unchecked;
  std::string method;  // "exact-low-dim" or "sampled"
  double alpha = 0.0;   // set when d was built by construction
  double lambda = 0.0;
  // Refutation details.
  Vec witness;
  std::optional<std::pair<ConeIndex, ConeIndex>> cone_pair;
  std::optional<ConeIndex> intersection;
  double distance = 0.0;
  double threshold = 0.0;

  bool certified() const { return status == Status::certified; }
  bool refuted() const { return status == Status::refuted; }
};

inline const char* to_string(WellDefinedness::Status s) {
  switch (s) {
    case WellDefinedness::Status::unchecked: return "unchecked";
    case WellDefinedness::Status::certified: return "certified";
    case WellDefinedness::Status::refuted: return "refuted";
  }
  return "unchecked";
}

/// Per-dimension thresholds (d_0, ..., d_{n-1}).
struct DeltaVec {
  Vec d;
  WellDefinedness certificate;

  static DeltaVec unchecked(Vec d) {
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (!(d(i) > 0.0) || !std::isfinite(d(i))) throw InputError("threshold entries must be positive and finite");
    return DeltaVec{std::move(d), {}};
  }
  double max() const { return d.size() ? d.maxCoeff() : 0.0; }
};

inline void require_complete(const Fan& f, const char* op) {
  if (!f.complete()) throw PreconditionError(std::string(op) + ": fan is not known to be complete");
}

inline void require_point(const Fan& f, const Vec& x) {
  if (x.size() != f.ambient_dim()) throw InputError("point dimension does not match the fan");
  if (!x.allFinite()) throw InputError("point has non-finite entries");
}

/// TDI right-hand side: polar of the intersection of all maximal cones
/// within delta of X.
inline InclusionRHS eval_tdi(const Fan& f, double delta, const Vec& x) {
  require_complete(f, "eval_tdi");
  require_point(f, x);
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  std::vector<ConeIndex> near;
  for (ConeIndex i : f.maximal())
    if (distance(f.cone(i), x) <= delta + tolerance()) near.push_back(i);
  if (near.empty()) throw NumericalError("eval_tdi: no maximal cone within delta (fan not complete near X)");
  const ConeIndex c = f.largest_common_face(near);
  return {f.polar_of(c), c, f.ambient_dim() + 1};
}

/// QTDI right-hand side: scan cones by ascending dimension and stop at the
/// first step where exactly one cone lies within its threshold.
inline InclusionRHS eval_qtdi(const Fan& f, const DeltaVec& d, const Vec& x, bool allow_unchecked = false) {
  require_complete(f, "eval_qtdi");
  require_point(f, x);
  const Eigen::Index n = f.ambient_dim();
  if (d.d.size() != n) throw InputError("threshold vector length must equal the ambient dimension");
  if (!allow_unchecked && !d.certificate.certified())
    throw PreconditionError("eval_qtdi: thresholds are not certified well-defined");
  for (Eigen::Index k = 0; k < n; ++k) {
    std::optional<ConeIndex> hit;
    for (ConeIndex i : f.cones_of_dim(k)) {
      if (distance(f.cone(i), x) <= d.d(k) + tolerance()) {
        if (hit) throw AmbiguityError(k, *hit, i, x);
        hit = i;
      }
    }
    if (hit) return {f.polar_of(*hit), *hit, k};
  }
  // Lowest-index maximal cone containing X; fall back to the nearest one.
  std::optional<ConeIndex> nearest;
  double best = std::numeric_limits<double>::infinity();
  for (ConeIndex i : f.maximal()) {
    const double dist = distance(f.cone(i), x);
    if (dist <= tolerance() * std::max(1.0, x.norm())) return {f.polar_of(i), i, n};
    if (dist < best) {
      best = dist;
      nearest = i;
    }
  }
  if (!nearest) throw NumericalError("eval_qtdi: fan has no maximal cones");
  return {f.polar_of(*nearest), *nearest, n};
}

struct AlphaCertificate {
  std::vector<ConeIndex> subset;
  ConeIndex intersection_index = 0;
  double alpha = 1.0;
  bool exact = true;
  std::size_t samples = 0;
  std::size_t restarts = 0;
  Vec witness;

  std::string method() const { return exact ? "exact-low-dim" : "sampled"; }
};

/// Reported alpha for sampled (ambient dim >= 3) estimates is the best
/// witness times this factor.
inline constexpr double kSampledAlphaSafety = 1.25;

/// sup dist(X, Ĉ) over {dist(X, C_i) <= 1 for all i}, Ĉ the intersection of the subset.
inline AlphaCertificate estimate_alpha(const Fan& f, std::span<const ConeIndex> subset,
                                       const TubeSearchOptions& opts = {}) {
  if (subset.empty()) throw InputError("estimate_alpha: empty subset");
  for (ConeIndex i : subset)
    if (i >= f.size()) throw InputError("estimate_alpha: cone index out of range");
  AlphaCertificate cert;
  cert.subset.assign(subset.begin(), subset.end());
  cert.intersection_index = f.largest_common_face(subset);
  std::vector<TubeTerm> terms;
  for (ConeIndex i : subset) terms.push_back({&f.cone(i), 1.0});
  const TubeSup s = tube_sup(f.cone(cert.intersection_index), terms, opts);
  if (s.unbounded) throw NumericalError("estimate_alpha: unbounded supremum (subset intersection mismatch)");
  cert.exact = s.exact;
  cert.alpha = s.exact ? s.value : s.value * kSampledAlphaSafety;
  if (!s.exact) {
    cert.samples = opts.samples;
    cert.restarts = opts.restarts;
  }
  cert.witness = s.witness;
  return cert;
}

inline AlphaCertificate estimate_alpha(const Fan& f, std::initializer_list<ConeIndex> subset,
                                       const TubeSearchOptions& opts = {}) {
  return estimate_alpha(f, std::span<const ConeIndex>(subset.begin(), subset.size()), opts);
}

/// Radius used for a cone of dimension k in the pairwise check: d_k below the
/// ambient dimension, membership for maximal cones.
inline double pair_radius(const DeltaVec& d, Eigen::Index k) { return k < d.d.size() ? d.d(k) : 0.0; }

/// Pairwise well-definedness: for every pair (C, C') with neither contained in
/// the other, dist(X, C) <= d_k and dist(X, C') <= d_m must imply
/// dist(X, C ∩ C') <= d_h. Returns the first refuting pair in index order.
inline WellDefinedness check_well_defined(const Fan& f, const DeltaVec& d, const TubeSearchOptions& opts = {}) {
  require_complete(f, "check_well_defined");
  const Eigen::Index n = f.ambient_dim();
  if (d.d.size() != n) throw InputError("threshold vector length must equal the ambient dimension");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(d.d(i) > 0.0)) throw InputError("threshold entries must be positive");

  WellDefinedness out = d.certificate;
  out.status = WellDefinedness::Status::certified;
  out.witness = Vec();
  out.cone_pair.reset();
  out.intersection.reset();
  bool exact = true;
  for (ConeIndex i = 0; i < f.size(); ++i) {
    for (ConeIndex j = i + 1; j < f.size(); ++j) {
      if (f.is_subcone(i, j) || f.is_subcone(j, i)) continue;
      const Cone& a = f.cone(i);
      const Cone& b = f.cone(j);
      const double ra = pair_radius(d, a.dim());
      const double rb = pair_radius(d, b.dim());
      if (ra == 0.0 && rb == 0.0) continue;
      const std::array<ConeIndex, 2> pair{i, j};
      const ConeIndex h = f.largest_common_face(pair);
      const Cone& meet = f.cone(h);
      const double threshold = pair_radius(d, meet.dim());
      const std::array<TubeTerm, 2> terms{TubeTerm{&a, ra}, TubeTerm{&b, rb}};
      TubeSearchOptions local = opts;
      local.seed = opts.seed + i * f.size() + j;
      const TubeSup s = tube_sup(meet, terms, local);
      exact = exact && s.exact;
      if (s.unbounded || s.value > threshold * (1.0 + 1e-9) + 1e-12) {
        out.status = WellDefinedness::Status::refuted;
        out.witness = s.witness;
        out.cone_pair = std::make_pair(i, j);
        out.intersection = h;
        out.distance = s.value;
        out.threshold = threshold;
        out.method = s.exact ? "exact-low-dim" : "sampled";
        return out;
      }
    }
  }
  out.method = exact ? "exact-low-dim" : "sampled";
  return out;
}

}  // namespace conefan

#endif  // CONEFAN_INCLUSIONS_HPP
