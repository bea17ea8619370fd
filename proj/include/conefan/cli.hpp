// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_CLI_HPP
#define CONEFAN_CLI_HPP

#include "conefan/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>

namespace conefan::cli {

using io::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRefuted = 2;

namespace detail {

struct Globals {
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::optional<std::size_t> samples;
  std::string output;
};

inline json rhs_to_json(const InclusionRHS& r) {
  return json{{"cone_index", r.source_cone_index},
              {"step", r.step},
              {"polar_dim", r.cone.dim()},
              {"polar_generators", io::vecs_to_json(r.cone.generators())}};
}

inline json certificate_to_json(const WellDefinedness& w) {
  json j{{"status", to_string(w.status)}, {"method", w.method}};
  if (w.alpha > 0.0) {
    j["alpha"] = w.alpha;
    j["lambda"] = w.lambda;
  }
  if (w.refuted()) {
    j["witness"] = io::vec_to_json(w.witness);
    j["cone_pair"] = {w.cone_pair->first, w.cone_pair->second};
    j["intersection"] = *w.intersection;
    j["distance"] = w.distance;
    j["threshold"] = w.threshold;
  }
  return j;
}

inline json ambiguity_to_json(const AmbiguityError& e) {
  return json{{"ambiguous", true},
              {"step", e.step()},
              {"cones", {e.first(), e.second()}},
              {"point", io::vec_to_json(e.point())},
              {"message", e.what()}};
}

inline RateSpec parse_rates(const std::string& text, std::size_t edges, std::uint64_t seed) {
  if (text.empty()) return RateSpec::uniform(edges);
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    const auto v = parse_number_list(text.substr(colon + 1));
    if (kind == "sinusoidal") {
      if (v.size() > 2) throw InputError("sinusoidal rates take epsilon[,omega]");
      return RateSpec::sinusoidal(edges, v[0], v.size() > 1 ? v[1] : 1.0, seed);
    }
    if (kind == "piecewise") {
      if (v.size() > 2) throw InputError("piecewise rates take epsilon[,interval]");
      return RateSpec::piecewise(edges, v[0], v.size() > 1 ? v[1] : 1.0, seed);
    }
    throw InputError("unknown rate profile '" + kind + "'");
  }
  const auto v = parse_number_list(text);
  if (v.size() == 1) return RateSpec::uniform(edges, v[0]);
  if (v.size() != edges) throw InputError("--k needs one rate per edge (or a single shared rate)");
  return RateSpec::constant(v);
}

inline Vec parse_point(const std::string& text) { return make_vec(parse_number_list(text)); }

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  detail::Globals g;
  CLI::App app{"Polyhedral fans, toric and quasi-toric differential inclusions, reaction networks", "conefan"};
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "seed for every randomized procedure")->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "geometric tolerance (overrides CONEFAN_TOLERANCE)");
  app.add_option("--samples", g.samples, "sample count for sampling-based checks");
  app.add_option("-o,--output", g.output, "write the result here instead of stdout");

  std::function<int(json&)> action;
  std::string text_output;  // non-JSON output (trajectory CSV)
  bool text_mode = false;

  auto validate_opts = [&] {
    ValidateOptions o;
    if (g.samples) o.completeness_samples = *g.samples;
    o.seed = g.seed;
    return o;
  };
  auto search_opts = [&] {
    TubeSearchOptions o;
    if (g.samples) o.samples = *g.samples;
    o.seed = g.seed;
    return o;
  };

  // fan
  auto* fan = app.add_subcommand("fan", "fan construction and validation");
  fan->require_subcommand(1);
  std::string fan_file;
  auto* fan_validate = fan->add_subcommand("validate", "check face closure, pairwise intersections and completeness");
  fan_validate->add_option("file", fan_file)->required();
  fan_validate->callback([&] {
    action = [&](json& res) {
      io::FanInput in = io::fan_input_from_json(io::load_json_file(fan_file));
      if (in.from_hyperplanes) {
        const Fan f = hyperplane_fan(in.hyperplanes, in.ambient_dim);
        res = {{"valid", true}, {"completeness", to_string(f.completeness())}, {"cones", f.size()}};
        return kExitOk;
      }
      const FanValidation v = validate_fan(in.cones, validate_opts());
      json viol = json::array();
      for (const auto& x : v.violations) {
        json item{{"kind", x.kind == FanViolation::Kind::missing_face ? "missing-face" : "bad-intersection"},
                  {"first", x.first},
                  {"message", x.message},
                  {"witness", io::cone_to_json(x.witness)}};
        if (x.second) item["second"] = *x.second;
        viol.push_back(item);
      }
      res = {{"valid", v.ok()}, {"violations", viol}};
      if (v.ok()) {
        res["cones"] = v.fan->size();
        res["completeness"] = to_string(v.fan->completeness());
      }
      return v.ok() ? kExitOk : kExitRefuted;
    };
  });
  auto* fan_hyper = fan->add_subcommand("from-hyperplanes", "fan of a central hyperplane arrangement");
  fan_hyper->add_option("file", fan_file)->required();
  fan_hyper->callback([&] {
    action = [&](json& res) {
      const json j = io::load_json_file(fan_file);
      io::FanInput in = io::fan_input_from_json(j);
      if (!in.from_hyperplanes) throw InputError("expected a 'hyperplanes' array");
      res = io::fan_to_json(hyperplane_fan(in.hyperplanes, in.ambient_dim));
      return kExitOk;
    };
  });

  // cone
  auto* cone = app.add_subcommand("cone", "single-cone operations");
  cone->require_subcommand(1);
  std::string cone_file, point_text;
  long long face_dim = 0;
  auto* cone_polar = cone->add_subcommand("polar", "polar cone");
  cone_polar->add_option("file", cone_file)->required();
  cone_polar->callback([&] {
    action = [&](json& res) {
      res = io::cone_to_json(polar(io::cone_from_json(io::load_json_file(cone_file))));
      return kExitOk;
    };
  });
  auto* cone_project = cone->add_subcommand("project", "nearest point and distance");
  cone_project->add_option("file", cone_file)->required();
  cone_project->add_option("--point", point_text)->required();
  cone_project->callback([&] {
    action = [&](json& res) {
      const Cone c = io::cone_from_json(io::load_json_file(cone_file));
      const Vec x = detail::parse_point(point_text);
      if (x.size() != c.ambient_dim()) throw InputError("point dimension does not match the cone");
      const auto p = project_point(c, x);
      res = {{"nearest_point", io::vec_to_json(p.nearest_point)},
             {"distance", p.distance},
             {"active_face_dim", p.active_face_dim}};
      return kExitOk;
    };
  });
  auto* cone_faces = cone->add_subcommand("faces", "faces of a given dimension");
  cone_faces->add_option("file", cone_file)->required();
  cone_faces->add_option("--dim", face_dim)->required();
  cone_faces->callback([&] {
    action = [&](json& res) {
      const Cone c = io::cone_from_json(io::load_json_file(cone_file));
      json arr = json::array();
      for (const auto& f : faces(c, static_cast<Eigen::Index>(face_dim))) arr.push_back(io::cone_to_json(f));
      res = {{"dim", face_dim}, {"faces", arr}};
      return kExitOk;
    };
  });

  // tdi / qtdi
  std::string fan_path, d_text;
  double delta = 0.0;
  bool certify = false;
  auto* tdi = app.add_subcommand("tdi", "toric differential inclusions");
  tdi->require_subcommand(1);
  auto* tdi_eval = tdi->add_subcommand("eval", "right-hand side at a point");
  tdi_eval->add_option("--fan", fan_path)->required();
  tdi_eval->add_option("--delta", delta)->required();
  tdi_eval->add_option("--point", point_text)->required();
  tdi_eval->callback([&] {
    action = [&](json& res) {
      const Fan f = io::load_fan(fan_path, validate_opts());
      res = detail::rhs_to_json(eval_tdi(f, delta, detail::parse_point(point_text)));
      return kExitOk;
    };
  });

  auto* qtdi = app.add_subcommand("qtdi", "quasi-toric differential inclusions");
  qtdi->require_subcommand(1);
  auto* qtdi_eval = qtdi->add_subcommand("eval", "right-hand side at a point");
  qtdi_eval->add_option("--fan", fan_path)->required();
  qtdi_eval->add_option("--d", d_text)->required();
  qtdi_eval->add_option("--point", point_text)->required();
  qtdi_eval->add_flag("--certify", certify, "refuse to evaluate unless d is certified well-defined");
  qtdi_eval->callback([&] {
    action = [&](json& res) {
      const Fan f = io::load_fan(fan_path, validate_opts());
      DeltaVec d = DeltaVec::unchecked(detail::parse_point(d_text));
      if (certify) {
        d.certificate = check_well_defined(f, d, search_opts());
        if (d.certificate.refuted()) {
          res = {{"certificate", detail::certificate_to_json(d.certificate)}};
          return kExitRefuted;
        }
      }
      try {
        const InclusionRHS rhs = eval_qtdi(f, d, detail::parse_point(point_text), true);
        res = detail::rhs_to_json(rhs);
        if (!d.certificate.certified() && rhs.step == f.ambient_dim())
          res["warning"] = "thresholds not certified; maximal cone chosen by lowest index";
      } catch (const AmbiguityError& e) {
        res = detail::ambiguity_to_json(e);
        return kExitRefuted;
      }
      res["certificate"] = to_string(d.certificate.status);
      return kExitOk;
    };
  });
  auto* qtdi_certify = qtdi->add_subcommand("certify", "certify or refute well-definedness of d");
  qtdi_certify->add_option("--fan", fan_path)->required();
  qtdi_certify->add_option("--d", d_text)->required();
  qtdi_certify->callback([&] {
    action = [&](json& res) {
      const Fan f = io::load_fan(fan_path, validate_opts());
      const WellDefinedness w = check_well_defined(f, DeltaVec::unchecked(detail::parse_point(d_text)), search_opts());
      res = detail::certificate_to_json(w);
      return w.refuted() ? kExitRefuted : kExitOk;
    };
  });

  // embed
  std::string inner_text, outer_text;
  double radius = 0.0;
  auto* embed = app.add_subcommand("embed", "embeddings between the two inclusion families");
  embed->require_subcommand(1);
  auto* embed_tq = embed->add_subcommand("tdi-to-qtdi", "certified d with F_delta ⊆ F_d");
  embed_tq->add_option("--fan", fan_path)->required();
  embed_tq->add_option("--delta", delta)->required();
  embed_tq->callback([&] {
    action = [&](json& res) {
      const Fan f = io::load_fan(fan_path, validate_opts());
      const DeltaVec d = embed_tdi_in_qtdi(f, delta, search_opts());
      res = {{"d", io::vec_to_json(d.d)}, {"certificate", detail::certificate_to_json(d.certificate)}};
      return kExitOk;
    };
  });
  auto* embed_qt = embed->add_subcommand("qtdi-to-tdi", "delta with F_d ⊆ F_delta");
  embed_qt->add_option("--d", d_text)->required();
  embed_qt->add_option("--fan", fan_path, "certify d against this fan first");
  embed_qt->callback([&] {
    action = [&](json& res) {
      DeltaVec d = DeltaVec::unchecked(detail::parse_point(d_text));
      if (!fan_path.empty()) {
        const Fan f = io::load_fan(fan_path, validate_opts());
        d.certificate = check_well_defined(f, d, search_opts());
        if (d.certificate.refuted()) {
          res = {{"certificate", detail::certificate_to_json(d.certificate)}};
          return kExitRefuted;
        }
      }
      res = {{"delta", embed_qtdi_in_tdi(d)}, {"certificate", to_string(d.certificate.status)}};
      return kExitOk;
    };
  });
  auto* embed_verify = embed->add_subcommand("verify", "check inner(X) ⊆ outer(X) on sampled points");
  embed_verify->add_option("--fan", fan_path)->required();
  embed_verify->add_option("--inner", inner_text)->required();
  embed_verify->add_option("--outer", outer_text)->required();
  embed_verify->add_option("--radius", radius, "sampling radius (default 10x the largest threshold)");
  embed_verify->callback([&] {
    action = [&](json& res) {
      const Fan f = io::load_fan(fan_path, validate_opts());
      VerifyOptions o;
      if (g.samples) o.samples = *g.samples;
      o.seed = g.seed;
      o.radius = radius;
      const auto rep = verify_embedding(f, parse_inclusion_spec(inner_text), parse_inclusion_spec(outer_text), o);
      json w = json::array();
      for (const auto& v : rep.witnesses) {
        json item{{"point", io::vec_to_json(v.point)}, {"reason", v.reason}};
        if (v.inner_cone) item["inner_cone"] = *v.inner_cone;
        if (v.outer_cone) item["outer_cone"] = *v.outer_cone;
        w.push_back(item);
      }
      res = {{"points_checked", rep.points_checked},
             {"radius", rep.radius},
             {"violations", rep.violations},
             {"witnesses", w}};
      return rep.ok() ? kExitOk : kExitRefuted;
    };
  });

  // net
  std::string net_file, x0_text, k_text, traj_path, qtdi_d_text;
  double horizon = 10.0;
  std::optional<double> net_delta;
  auto* net = app.add_subcommand("net", "reaction networks");
  net->require_subcommand(1);
  auto* net_check = net->add_subcommand("check", "weak reversibility and endotacticity");
  net_check->add_option("file", net_file)->required();
  net_check->callback([&] {
    action = [&](json& res) {
      const EGraph eg = io::egraph_from_json(io::load_json_file(net_file));
      const auto endo = is_endotactic(eg, g.samples.value_or(100000), g.seed);
      res = {{"weakly_reversible", is_weakly_reversible(eg)},
             {"endotactic", endo.endotactic},
             {"endotactic_exact", endo.exact},
             {"stoichiometric_dim", eg.stoich_basis().cols()}};
      if (!endo.endotactic) res["endotactic_witness"] = io::vec_to_json(endo.witness);
      if (!endo.exact) res["warning"] = "endotactic check sampled directions (dimension above 3)";
      return kExitOk;
    };
  });
  auto* net_sim = net->add_subcommand("simulate", "integrate mass-action dynamics; writes trajectory CSV");
  net_sim->add_option("file", net_file)->required();
  net_sim->add_option("--x0", x0_text)->required();
  net_sim->add_option("--T", horizon, "time horizon")->capture_default_str();
  net_sim->add_option("--k", k_text, "rates: 'k' | 'k1,k2,...' | 'sinusoidal:eps[,omega]' | 'piecewise:eps[,interval]'");
  net_sim->callback([&] {
    action = [&](json& res) {
      const EGraph eg = io::egraph_from_json(io::load_json_file(net_file));
      const RateSpec k = detail::parse_rates(k_text, eg.edges().size(), g.seed);
      Trajectory traj;
      int code = kExitOk;
      try {
        traj = simulate(eg, k, detail::parse_point(x0_text), horizon);
      } catch (const StepUnderflowError& e) {
        traj = e.partial();
        err << "error: " << e.what() << "\n";
        code = kExitError;
      }
      std::ostringstream csv;
      io::write_trajectory_csv(csv, traj);
      text_output = csv.str();
      text_mode = true;
      const auto tail = tail_diagnostics(traj);
      res = {{"reason", to_string(traj.reason)},
             {"stopped_at", traj.horizon},
             {"samples", traj.size()},
             {"tail_from", tail.from_time},
             {"tail_min", io::vec_to_json(tail.component_min)},
             {"tail_box_hi", io::vec_to_json(tail.box_hi)}};
      return code;
    };
  });
  auto* net_member = net->add_subcommand("membership", "check trajectory derivatives against an inclusion");
  net_member->add_option("--traj", traj_path)->required();
  net_member->add_option("--fan", fan_path)->required();
  auto* opt_qd = net_member->add_option("--qtdi-d", qtdi_d_text, "QTDI thresholds");
  auto* opt_delta = net_member->add_option("--delta", net_delta, "TDI delta");
  opt_qd->excludes(opt_delta);
  net_member->callback([&] {
    action = [&](json& res) {
      if (qtdi_d_text.empty() == !net_delta) throw InputError("give exactly one of --qtdi-d or --delta");
      const Fan f = io::load_fan(fan_path, validate_opts());
      const Trajectory traj = io::load_trajectory(traj_path);
      const InclusionSpec spec = net_delta ? InclusionSpec::tdi(*net_delta)
                                           : InclusionSpec::qtdi(DeltaVec::unchecked(detail::parse_point(qtdi_d_text)));
      const auto rep = trajectory_membership(traj, f, spec);
      res = {{"samples", rep.samples}, {"satisfied", rep.satisfied}, {"fraction", rep.fraction()}};
      if (rep.first_violation) {
        res["first_violation"] = {{"index", *rep.first_violation},
                                  {"t", traj.times[*rep.first_violation]},
                                  {"reason", rep.violation_reason}};
      }
      return rep.first_violation ? kExitRefuted : kExitOk;
    };
  });

  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (auto* leaf : sub->get_subcommands({})) leaf->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  tolerance_setting() = 1e-9;
  if (const char* env = std::getenv("CONEFAN_TOLERANCE")) {
    try {
      tolerance_setting() = parse_number_list(env).at(0);
    } catch (const std::exception&) {
      err << "error: CONEFAN_TOLERANCE is not a number\n";
      return kExitError;
    }
  }
  if (g.tolerance) tolerance_setting() = *g.tolerance;
  if (!(tolerance() > 0.0)) {
    err << "error: tolerance must be positive\n";
    return kExitError;
  }

  json result;
  int code = kExitOk;
  try {
    code = action(result);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const std::string body = text_mode ? text_output : result.dump(2) + "\n";
  if (text_mode) err << result.dump() << "\n";
  if (g.output.empty()) {
    out << body;
  } else {
    std::ofstream f(g.output, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << g.output << "'\n";
      return kExitError;
    }
    f << body;
  }
  return code;
}

}  // namespace conefan::cli

#endif  // CONEFAN_CLI_HPP
