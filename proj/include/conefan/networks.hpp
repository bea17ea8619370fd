// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_NETWORKS_HPP
#define CONEFAN_NETWORKS_HPP

#include "conefan/embeddings.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <boost/numeric/odeint.hpp>

#include <functional>
#include <limits>
#include <random>

namespace conefan {

/// Euclidean embedded graph: complexes in R^n and reactions between them.
class EGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  static EGraph create(Eigen::Index dim, std::vector<Vec> vertices, std::vector<Edge> edges, double epsilon = 1.0) {
    if (dim < 1) throw InputError("e-graph dimension must be positive");
    for (const auto& v : vertices) {
      if (v.size() != dim) throw InputError("vertex dimension does not match 'dim'");
      if (!v.allFinite()) throw InputError("vertex has non-finite entries");
    }
    for (const auto& [s, t] : edges) {
      if (s >= vertices.size() || t >= vertices.size()) throw InputError("edge endpoint out of range");
      if (s == t || (vertices[s] - vertices[t]).norm() == 0.0) throw InputError("self-loop edge");
    }
    if (!(epsilon >= 1.0)) throw InputError("epsilon must be >= 1");
    EGraph g;
    g.dim_ = dim;
    g.vertices_ = std::move(vertices);
    g.edges_ = std::move(edges);
    g.epsilon_ = epsilon;
    Mat reactions(dim, static_cast<Eigen::Index>(g.edges_.size()));
    for (std::size_t e = 0; e < g.edges_.size(); ++e) reactions.col(static_cast<Eigen::Index>(e)) = g.reaction(e);
    g.stoich_basis_ = linalg::column_basis(reactions);
    return g;
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double epsilon() const { return epsilon_; }
  const Vec& source(std::size_t e) const { return vertices_[edges_[e].first]; }
  Vec reaction(std::size_t e) const { return vertices_[edges_[e].second] - vertices_[edges_[e].first]; }
  /// Orthonormal basis of S = span{y' - y}.
  const Mat& stoich_basis() const { return stoich_basis_; }

  double distance_to_stoich(const Vec& v) const { return (v - stoich_basis_ * (stoich_basis_.transpose() * v)).norm(); }

 private:
  Eigen::Index dim_ = 0;
  std::vector<Vec> vertices_;
  std::vector<Edge> edges_;
  double epsilon_ = 1.0;
  Mat stoich_basis_;
};

/// Time profile of one rate constant.
struct RateProfile {
  enum class Kind { constant, sinusoidal, piecewise };
  Kind kind = Kind::constant;
  double k = 1.0;
  // sinusoidal: k(t) = epsilon^(amplitude * sin(omega t + phase)), amplitude in [0, 1]
  // piecewise:  k(t) = epsilon^(2u - 1), u uniform per interval of length `interval`
  double epsilon = 1.0;
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
  double interval = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Per-edge rate functions k_{y->y'}(t).
class RateSpec {
 public:
  static RateSpec constant(std::vector<double> ks) {
    RateSpec r;
    for (double k : ks) {
      if (!(k > 0.0) || !std::isfinite(k)) throw InputError("rate constants must be positive");
      RateProfile p;
      p.k = k;
      r.profiles_.push_back(p);
    }
    return r;
  }

  static RateSpec uniform(std::size_t edges, double k = 1.0) { return constant(std::vector<double>(edges, k)); }

  static RateSpec sinusoidal(std::size_t edges, double epsilon, double omega = 1.0, std::uint64_t seed = 0,
                             double amplitude = 1.0) {
    if (!(epsilon >= 1.0)) throw InputError("epsilon must be >= 1");
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) throw InputError("amplitude must lie in [0, 1]");
    RateSpec r;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
    for (std::size_t e = 0; e < edges; ++e) {
      RateProfile p;
      p.kind = RateProfile::Kind::sinusoidal;
      p.epsilon = epsilon;
      p.amplitude = amplitude;
      p.omega = omega;
      p.phase = phase(rng);
      r.profiles_.push_back(p);
    }
    return r;
  }

  static RateSpec piecewise(std::size_t edges, double epsilon, double interval = 1.0, std::uint64_t seed = 0) {
    if (!(epsilon >= 1.0)) throw InputError("epsilon must be >= 1");
    if (!(interval > 0.0)) throw InputError("interval must be positive");
    RateSpec r;
    for (std::size_t e = 0; e < edges; ++e) {
      RateProfile p;
      p.kind = RateProfile::Kind::piecewise;
      p.epsilon = epsilon;
      p.interval = interval;
      p.seed = seed;
      r.profiles_.push_back(p);
    }
    return r;
  }

  std::size_t size() const { return profiles_.size(); }
  const std::vector<RateProfile>& profiles() const { return profiles_; }

  double operator()(std::size_t edge, double t) const {
    const RateProfile& p = profiles_.at(edge);
    switch (p.kind) {
      case RateProfile::Kind::constant:
        return p.k;
      case RateProfile::Kind::sinusoidal:
        return std::pow(p.epsilon, p.amplitude * std::sin(p.omega * t + p.phase));
      case RateProfile::Kind::piecewise: {
        const auto slot = static_cast<std::int64_t>(std::floor(t / p.interval));
        std::uint64_t h = detail::splitmix64(p.seed);
        h = detail::splitmix64(h ^ edge);
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(slot));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        return std::pow(p.epsilon, 2.0 * u - 1.0);
      }
    }
    return p.k;
  }

 private:
  std::vector<RateProfile> profiles_;
};

namespace detail {

inline void mass_action_into(const EGraph& g, const RateSpec& k, double t, const double* x, double* out) {
  const Eigen::Index n = g.dim();
  std::fill(out, out + n, 0.0);
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Vec& y = g.source(e);
    double mono = k(e, t);
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) != 0.0) mono *= std::pow(std::max(x[i], 0.0), y(i));
    const Vec& y2 = g.vertices()[g.edges()[e].second];
    for (Eigen::Index i = 0; i < n; ++i) out[i] += mono * (y2(i) - y(i));
  }
}

}  // namespace detail

/// Sum over edges of k(t) x^y (y' - y).
inline Vec mass_action_rhs(const EGraph& g, const RateSpec& k, double t, const Vec& x) {
  if (x.size() != g.dim()) throw InputError("state dimension does not match the e-graph");
  if (k.size() != g.edges().size()) throw InputError("rate spec must have one entry per edge");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x(i) > 0.0)) throw InputError("mass-action state must be strictly positive");
  Vec out(g.dim());
  detail::mass_action_into(g, k, t, x.data(), out.data());
  return out;
}

/// Every edge lies on a directed cycle.
inline bool is_weakly_reversible(const EGraph& g) {
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
  Graph graph(g.vertices().size());
  for (const auto& [s, t] : g.edges()) boost::add_edge(s, t, graph);
  std::vector<int> comp(g.vertices().size());
  boost::strong_components(graph, comp.data());
  return std::all_of(g.edges().begin(), g.edges().end(), [&](const auto& e) { return comp[e.first] == comp[e.second]; });
}

struct EndotacticResult {
  bool endotactic = true;
  Vec witness;         // violating direction u when not endotactic
  bool exact = true;   // false when cells were sampled (dim > 3)
  std::size_t directions_checked = 0;
};

namespace detail {

// Whether direction u satisfies the endotactic condition.
inline bool endotactic_at(const EGraph& g, const Vec& u) {
  const double scale = u.norm();
  double max_pos = -std::numeric_limits<double>::infinity();
  double max_neg = -std::numeric_limits<double>::infinity();
  bool any_pos = false;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Vec r = g.reaction(e);
    const double tol = 1e-10 * scale * std::max(1.0, r.norm());
    const double s = u.dot(r);
    const double h = u.dot(g.source(e));
    if (s > tol) {
      any_pos = true;
      max_pos = std::max(max_pos, h);
    } else if (s < -tol) {
      max_neg = std::max(max_neg, h);
    }
  }
  if (!any_pos) return true;
  return max_neg > max_pos + 1e-10 * scale;
}

// One representative per relatively open cell of the central arrangement
// {u : h . u = 0} restricted to span(basis). Lower cells come from recursing
// into each hyperplane; full cells sit just off a facet representative.
inline void arrangement_cells(const std::vector<Vec>& normals, const Mat& basis, std::vector<Vec>& out) {
  const Eigen::Index r = basis.cols();
  if (r == 0) return;
  std::vector<Vec> local;
  for (const auto& h : normals) {
    Vec c = basis.transpose() * h;
    const double nrm = c.norm();
    if (nrm < 1e-10 * std::max(1.0, h.norm())) continue;
    c /= nrm;
    const bool dup = std::any_of(local.begin(), local.end(),
                                 [&](const Vec& w) { return (w - c).norm() < 1e-10 || (w + c).norm() < 1e-10; });
    if (!dup) local.push_back(c);
  }
  if (local.empty()) {
    out.push_back(basis.col(0));
    out.push_back(-basis.col(0));
    return;
  }
  if (r == 1) {
    out.push_back(basis.col(0));
    out.push_back(-basis.col(0));
    return;
  }
  for (const auto& c : local) {
    const Mat sub = basis * linalg::null_space(c.transpose());
    std::vector<Vec> reps;
    arrangement_cells(normals, sub, reps);
    reps.push_back(Vec::Zero(basis.rows()));
    const Vec nrm = basis * c;
    for (const auto& p : reps) {
      out.push_back(p);
      const Vec pc = basis.transpose() * p;
      double eps = 1.0;
      for (const auto& w : local) {
        const double a = std::abs(w.dot(pc));
        const double b = std::abs(w.dot(c));
        if (a > 1e-12 && b > 1e-12) eps = std::min(eps, 0.5 * a / b);
      }
      out.push_back(p + eps * nrm);
      out.push_back(p - eps * nrm);
    }
  }
}

}  // namespace detail

inline constexpr Eigen::Index kEndotacticExactDim = 3;

/// Endotactic check over one direction per cell of the arrangement generated
/// by reaction vectors and source differences; sampled above dimension 3.
inline EndotacticResult is_endotactic(const EGraph& g, std::size_t samples = 100000, std::uint64_t seed = 0) {
  EndotacticResult res;
  std::vector<Vec> cands;
  std::vector<Vec> normals;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    cands.push_back(g.reaction(e));
    normals.push_back(g.reaction(e));
  }
  std::vector<Vec> sources;
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    if (!detail::near_duplicate(sources, g.source(e), 0.0)) sources.push_back(g.source(e));
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (std::size_t j = i + 1; j < sources.size(); ++j) normals.push_back(sources[i] - sources[j]);

  const Eigen::Index n = g.dim();
  if (n <= kEndotacticExactDim) {
    detail::arrangement_cells(normals, Mat::Identity(n, n), cands);
  } else {
    res.exact = false;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) cands.push_back(detail::random_unit(rng, n));
  }
  for (const auto& u : cands) {
    if (u.norm() == 0.0) continue;
    ++res.directions_checked;
    if (!detail::endotactic_at(g, u)) {
      res.endotactic = false;
      res.witness = u;
      return res;
    }
  }
  return res;
}

/// Sampled trajectory of the mass-action system.
struct Trajectory {
  enum class Stop { horizon, positivity_floor, blow_up };
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> derivatives;
  Stop reason = Stop::horizon;
  double horizon = 0.0;  // time at which integration stopped

  std::size_t size() const { return times.size(); }
};

inline const char* to_string(Trajectory::Stop s) {
  switch (s) {
    case Trajectory::Stop::horizon: return "horizon";
    case Trajectory::Stop::positivity_floor: return "positivity-floor";
    case Trajectory::Stop::blow_up: return "blow-up";
  }
  return "horizon";
}

/// Step size underflow; carries everything integrated so far.
class StepUnderflowError : public NumericalError {
 public:
  StepUnderflowError(const std::string& msg, Trajectory partial)
      : NumericalError(msg), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct SimulateOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 1e-3;
  double floor = 1e-12;
  double ceiling = 1e12;
  std::size_t max_steps = 10000000;
};

/// Adaptive Dormand-Prince integration of the mass-action system from x0.
inline Trajectory simulate(const EGraph& g, const RateSpec& k, const Vec& x0, double horizon,
                           const SimulateOptions& opts = {}) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  if (x0.size() != g.dim()) throw InputError("initial state dimension does not match the e-graph");
  if (k.size() != g.edges().size()) throw InputError("rate spec must have one entry per edge");
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    if (!(x0(i) > 0.0)) throw InputError("initial state must be strictly positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be nonnegative and finite");

  const auto n = static_cast<std::size_t>(g.dim());
  auto system = [&](const State& x, State& dx, double t) { detail::mass_action_into(g, k, t, x.data(), dx.data()); };
  auto stepper = ode::make_controlled(opts.atol, opts.rtol, ode::runge_kutta_dopri5<State>());

  Trajectory traj;
  auto record = [&](double t, const State& x) {
    Vec xv = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(n));
    Vec dx(static_cast<Eigen::Index>(n));
    detail::mass_action_into(g, k, t, x.data(), dx.data());
    traj.times.push_back(t);
    traj.states.push_back(std::move(xv));
    traj.derivatives.push_back(std::move(dx));
  };

  State x(x0.data(), x0.data() + n);
  double t = 0.0;
  double dt = std::min(opts.initial_step, horizon > 0.0 ? horizon : opts.initial_step);
  record(t, x);
  std::size_t steps = 0;
  while (t < horizon) {
    if (++steps > opts.max_steps) throw NumericalError("simulate: step limit reached");
    const double remaining = horizon - t;
    const bool last = dt >= remaining;
    double step = last ? remaining : dt;
    State trial = x;
    const auto res = stepper.try_step(system, trial, t, step);
    if (res == ode::fail) {
      dt = step;
      if (dt < 1e-14 * std::max(1.0, std::abs(t))) {
        traj.horizon = t;
        throw StepUnderflowError("simulate: step size underflow at t = " + std::to_string(t), traj);
      }
      continue;
    }
    if (last) t = horizon;
    dt = last ? std::max(dt, step) : step;
    bool below = false, above = false;
    double norm2 = 0.0;
    for (double v : trial) {
      if (!(v >= opts.floor)) below = true;
      norm2 += v * v;
    }
    if (!std::isfinite(norm2) || std::sqrt(norm2) > opts.ceiling) above = true;
    if (below || above) {
      traj.reason = below ? Trajectory::Stop::positivity_floor : Trajectory::Stop::blow_up;
      traj.horizon = t;
      return traj;
    }
    x = std::move(trial);
    record(t, x);
  }
  traj.reason = Trajectory::Stop::horizon;
  traj.horizon = t;
  return traj;
}

/// Empirical persistence/permanence proxies over the trajectory tail.
struct TailDiagnostics {
  double from_time = 0.0;
  Vec component_min;
  Vec box_lo, box_hi;
};

inline TailDiagnostics tail_diagnostics(const Trajectory& traj, double tail_fraction = 0.5) {
  if (traj.states.empty()) throw InputError("empty trajectory");
  TailDiagnostics d;
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  d.from_time = t1 - tail_fraction * (t1 - t0);
  const Eigen::Index n = traj.states.front().size();
  d.box_lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  d.box_hi = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (traj.times[j] < d.from_time && j + 1 < traj.size()) continue;
    d.box_lo = d.box_lo.cwiseMin(traj.states[j]);
    d.box_hi = d.box_hi.cwiseMax(traj.states[j]);
  }
  d.component_min = d.box_lo;
  return d;
}

struct MembershipReport {
  std::size_t samples = 0;
  std::size_t satisfied = 0;
  std::optional<std::size_t> first_violation;
  std::string violation_reason;

  double fraction() const { return samples ? static_cast<double>(satisfied) / static_cast<double>(samples) : 1.0; }
};

/// Checks dx/dt(t_j) ∈ F(log x(t_j)) at every sample.
inline MembershipReport trajectory_membership(const Trajectory& traj, const Fan& f, const InclusionSpec& spec) {
  MembershipReport rep;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const Vec& x = traj.states[j];
    if (x.size() != f.ambient_dim()) throw InputError("trajectory dimension does not match the fan");
    if ((x.array() <= 0.0).any()) throw InputError("trajectory state is not strictly positive");
    ++rep.samples;
    std::string reason;
    try {
      const InclusionRHS rhs = evaluate(f, spec, x.array().log().matrix());
      if (rhs.cone.contains(traj.derivatives[j])) {
        ++rep.satisfied;
        continue;
      }
      reason = "derivative outside the polar of cone " + std::to_string(rhs.source_cone_index);
    } catch (const AmbiguityError& e) {
      reason = e.what();
    }
    if (!rep.first_violation) {
      rep.first_violation = j;
      rep.violation_reason = reason;
    }
  }
  return rep;
}

}  // namespace conefan

#endif  // CONEFAN_NETWORKS_HPP
