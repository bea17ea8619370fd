// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_EMBEDDINGS_HPP
#define CONEFAN_EMBEDDINGS_HPP

#include "conefan/inclusions.hpp"

#include <bit>
#include <functional>
#include <map>
#include <random>

namespace conefan {

/// Global alpha of a fan: the worst subset estimate over the families the
/// evaluators actually consult.
struct FanAlpha {
  double alpha = 1.0;
  bool exact = true;
  AlphaCertificate worst;
  std::size_t subsets_checked = 0;
};

namespace detail {

inline void consider(FanAlpha& out, AlphaCertificate c) {
  ++out.subsets_checked;
  out.exact = out.exact && c.exact;
  if (c.alpha > out.alpha) {
    out.alpha = c.alpha;
    out.worst = std::move(c);
  }
}

inline void subsets_up_to(std::size_t m, std::size_t max_size, const std::function<void(std::uint64_t)>& fn) {
  auto rec = [&](auto&& self, std::size_t start, std::uint64_t mask, std::size_t size) -> void {
    if (mask) fn(mask);
    if (size == max_size) return;
    for (std::size_t i = start; i < m; ++i) self(self, i + 1, mask | (std::uint64_t{1} << i), size + 1);
  };
  rec(rec, 0, 0, 0);
}

}  // namespace detail

/// Subsets of maximal cones (all of them up to 16 maximal cones, otherwise
/// those of size <= n + 1), keeping only subsets minimal for their
/// intersection, plus every non-nested pair of arbitrary cones.
inline FanAlpha fan_alpha(const Fan& f, const TubeSearchOptions& opts = {}) {
  FanAlpha out;
  const auto& maxi = f.maximal();
  const std::size_t m = maxi.size();
  if (m > 63) throw InputError("fan_alpha: too many maximal cones");

  std::map<std::uint64_t, ConeIndex> meet;
  auto meet_of = [&](std::uint64_t mask) {
    auto it = meet.find(mask);
    if (it != meet.end()) return it->second;
    std::vector<ConeIndex> members;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) members.push_back(maxi[i]);
    const ConeIndex h = f.largest_common_face(members);
    meet.emplace(mask, h);
    return h;
  };
  auto visit = [&](std::uint64_t mask) {
    if (std::popcount(mask) < 2) return;
    const ConeIndex h = meet_of(mask);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(mask >> i & 1)) continue;
      if (meet_of(mask & ~(std::uint64_t{1} << i)) == h) return;
    }
    std::vector<ConeIndex> members;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) members.push_back(maxi[i]);
    TubeSearchOptions local = opts;
    local.seed = opts.seed ^ (mask * 0x9e3779b97f4a7c15ULL);
    detail::consider(out, estimate_alpha(f, members, local));
  };
  const std::size_t limit = m <= 16 ? m : static_cast<std::size_t>(f.ambient_dim()) + 1;
  detail::subsets_up_to(m, limit, visit);

  for (ConeIndex i = 0; i < f.size(); ++i) {
    for (ConeIndex j = i + 1; j < f.size(); ++j) {
      if (f.is_subcone(i, j) || f.is_subcone(j, i)) continue;
      TubeSearchOptions local = opts;
      local.seed = opts.seed + 7919 * (i * f.size() + j);
      detail::consider(out, estimate_alpha(f, {i, j}, local));
    }
  }
  return out;
}

namespace detail {

inline constexpr int kAlphaRetries = 4;

// d_{n-1} = top, d_k = lambda * alpha * d_{k+1}; certified or retried with alpha doubled.
inline DeltaVec build_certified(const Fan& f, double top, const TubeSearchOptions& opts) {
  require_complete(f, "embedding");
  const Eigen::Index n = f.ambient_dim();
  const FanAlpha fa = fan_alpha(f, opts);
  double alpha = fa.alpha;
  for (int attempt = 0;; ++attempt) {
    const double lambda = std::max(1.0, 1.0 / alpha);
    DeltaVec d;
    d.d = Vec(n);
    if (n > 0) d.d(n - 1) = top;
    for (Eigen::Index k = n - 2; k >= 0; --k) d.d(k) = lambda * alpha * d.d(k + 1);
    d.certificate.alpha = alpha;
    d.certificate.lambda = lambda;
    WellDefinedness w = check_well_defined(f, d, opts);
    w.alpha = alpha;
    w.lambda = lambda;
    if (w.certified()) {
      if (!fa.exact) w.method = "sampled";
      d.certificate = std::move(w);
      return d;
    }
    if (fa.exact || attempt >= kAlphaRetries) {
      std::ostringstream s;
      s << "constructed thresholds refuted (alpha = " << alpha << ", pair " << w.cone_pair->first << "/"
        << w.cone_pair->second << ", distance " << w.distance << " > " << w.threshold << ")";
      throw NumericalError(s.str());
    }
    alpha *= 2.0;
  }
}

}  // namespace detail

/// d̃ >= d built from d̃_{n-1} = max(d).
inline DeltaVec inflate_d(const Fan& f, const DeltaVec& d, const TubeSearchOptions& opts = {}) {
  if (d.d.size() != f.ambient_dim()) throw InputError("threshold vector length must equal the ambient dimension");
  DeltaVec::unchecked(d.d);
  return detail::build_certified(f, d.max(), opts);
}

/// Thresholds d with F_{F,delta}(X) ⊆ F_{F,d}(X).
inline DeltaVec embed_tdi_in_qtdi(const Fan& f, double delta, const TubeSearchOptions& opts = {}) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InputError("delta must be positive");
  return detail::build_certified(f, delta, opts);
}

/// delta with F_{F,d}(X) ⊆ F_{F,delta}(X).
inline double embed_qtdi_in_tdi(const DeltaVec& d) {
  DeltaVec::unchecked(d.d);
  if (d.d.size() == 0) throw InputError("empty threshold vector");
  return d.max();
}

/// "tdi:<delta>" or "qtdi:<d0>,<d1>,...".
struct InclusionSpec {
  enum class Kind { tdi, qtdi };
  Kind kind = Kind::tdi;
  double delta = 0.0;
  DeltaVec d;

  static InclusionSpec tdi(double delta) {
    if (!(delta > 0.0)) throw InputError("delta must be positive");
    InclusionSpec s;
    s.delta = delta;
    return s;
  }
  static InclusionSpec qtdi(DeltaVec d) {
    InclusionSpec s;
    s.kind = Kind::qtdi;
    s.d = std::move(d);
    return s;
  }

  std::vector<double> thresholds() const { return kind == Kind::tdi ? std::vector<double>{delta} : to_std(d.d); }
};

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw InputError("empty entry in number list '" + text + "'");
    const auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
    if (used != item.size()) throw InputError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

inline InclusionSpec parse_inclusion_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("inclusion spec must look like tdi:<delta> or qtdi:<d0,...>");
  const std::string kind = text.substr(0, colon);
  const auto values = parse_number_list(text.substr(colon + 1));
  if (kind == "tdi") {
    if (values.size() != 1) throw InputError("tdi spec takes exactly one delta");
    return InclusionSpec::tdi(values[0]);
  }
  if (kind == "qtdi") return InclusionSpec::qtdi(DeltaVec::unchecked(make_vec(values)));
  throw InputError("unknown inclusion kind '" + kind + "'");
}

/// QTDI specs are evaluated without requiring a certificate; an ambiguity
/// surfaces as AmbiguityError.
inline InclusionRHS evaluate(const Fan& f, const InclusionSpec& s, const Vec& x) {
  if (s.kind == InclusionSpec::Kind::tdi) return eval_tdi(f, s.delta, x);
  return eval_qtdi(f, s.d, x, true);
}

struct EmbeddingViolation {
  Vec point;
  std::optional<ConeIndex> inner_cone, outer_cone;
  std::string reason;
};

struct EmbeddingReport {
  std::size_t points_checked = 0;
  std::size_t violations = 0;
  std::vector<EmbeddingViolation> witnesses;  // first few only
  double radius = 0.0;

  bool ok() const { return violations == 0; }
};

struct VerifyOptions {
  std::size_t samples = 10000;
  double radius = 0.0;  // 0 selects 10 x the largest threshold
  std::uint64_t seed = 0;
  std::size_t structured_per_cone = 8;
  std::size_t max_witnesses = 10;
};

/// Checks outer(X) ⊇ inner(X) on uniform ball samples plus points near every
/// cone at the scale of each threshold.
inline EmbeddingReport verify_embedding(const Fan& f, const InclusionSpec& inner, const InclusionSpec& outer,
                                        const VerifyOptions& opts = {}) {
  require_complete(f, "verify_embedding");
  const Eigen::Index n = f.ambient_dim();
  std::vector<double> scales = inner.thresholds();
  for (double t : outer.thresholds()) scales.push_back(t);
  const double largest = *std::max_element(scales.begin(), scales.end());
  EmbeddingReport rep;
  rep.radius = opts.radius > 0.0 ? opts.radius : 10.0 * largest;

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> points;
  points.reserve(opts.samples);
  for (std::size_t s = 0; s < opts.samples; ++s) {
    const double r = rep.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
    points.push_back(r * detail::random_unit(rng, n));
  }
  for (const auto& c : f.cones()) {
    for (double t : scales) {
      for (double k : {0.1, 0.5, 1.0, 2.0}) {
        for (std::size_t s = 0; s < opts.structured_per_cone; ++s) {
          const Vec seed_point = rep.radius * unit(rng) * detail::random_unit(rng, n);
          const Vec base = project_point(c, seed_point).nearest_point;
          points.push_back(base + k * t * unit(rng) * detail::random_unit(rng, n));
        }
      }
    }
  }

  std::map<std::pair<ConeIndex, ConeIndex>, bool> cache;
  auto record = [&](EmbeddingViolation v) {
    ++rep.violations;
    if (rep.witnesses.size() < opts.max_witnesses) rep.witnesses.push_back(std::move(v));
  };
  for (const auto& x : points) {
    ++rep.points_checked;
    InclusionRHS a, b;
    try {
      a = evaluate(f, inner, x);
    } catch (const AmbiguityError& e) {
      record({x, std::nullopt, std::nullopt, std::string("inner: ") + e.what()});
      continue;
    }
    try {
      b = evaluate(f, outer, x);
    } catch (const AmbiguityError& e) {
      record({x, a.source_cone_index, std::nullopt, std::string("outer: ") + e.what()});
      continue;
    }
    const auto key = std::make_pair(b.source_cone_index, a.source_cone_index);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, cone_contains_cone(b.cone, a.cone)).first;
    if (!it->second) record({x, a.source_cone_index, b.source_cone_index, "inner cone not contained in outer cone"});
  }
  return rep;
}

}  // namespace conefan

#endif  // CONEFAN_EMBEDDINGS_HPP
