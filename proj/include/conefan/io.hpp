// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#ifndef CONEFAN_IO_HPP
#define CONEFAN_IO_HPP

#include "conefan/networks.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace conefan::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses JSON text; syntax errors become InputError with line:column.
inline json parse_json(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": malformed JSON";
    const std::string what = e.what();
    const auto pos = what.find("parse error");
    if (pos != std::string::npos) msg << " (" << what.substr(pos) << ")";
    throw InputError(msg.str());
  }
}

inline json load_json_file(const std::string& path) { return parse_json(read_file(path), path); }

// Values within 1e-15 of zero are written as 0 to keep output free of
// rounding noise.
inline double clean(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(clean(v(i)));
  return a;
}

inline json vecs_to_json(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vec_to_json(v));
  return a;
}

inline Vec vec_from_json(const json& j, Eigen::Index expected, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of numbers");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    std::ostringstream s;
    s << what << " has length " << j.size() << ", expected " << expected;
    throw InputError(s.str());
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(std::string(what) + " must contain only numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  if (!v.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
  return v;
}

inline std::vector<Vec> vecs_from_json(const json& j, Eigen::Index expected, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of vectors");
  std::vector<Vec> out;
  for (const auto& item : j) out.push_back(vec_from_json(item, expected, what));
  return out;
}

inline Eigen::Index dim_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0)
    throw InputError(std::string("missing or invalid '") + key + "'");
  return static_cast<Eigen::Index>(j[key].get<long long>());
}

inline json cone_to_json(const Cone& c) {
  return json{{"ambient_dim", c.ambient_dim()},
              {"dim", c.dim()},
              {"generators", vecs_to_json(c.generators())},
              {"halfspaces", vecs_to_json(c.halfspaces())}};
}

inline Cone cone_from_json(const json& j, Eigen::Index expected_dim = -1) {
  if (!j.is_object()) throw InputError("cone must be a JSON object");
  const Eigen::Index n = dim_field(j, "ambient_dim");
  if (expected_dim >= 0 && n != expected_dim) throw InputError("cone ambient_dim does not match the fan");
  if (!j.contains("generators")) throw InputError("cone is missing 'generators'");
  return Cone::from_generators(vecs_from_json(j["generators"], n, "generator"), n);
}

inline json fan_to_json(const Fan& f) {
  json cones = json::array();
  for (const auto& c : f.cones()) cones.push_back(cone_to_json(c));
  return json{{"ambient_dim", f.ambient_dim()}, {"completeness", to_string(f.completeness())}, {"cones", cones}};
}

/// Either explicit cones or hyperplane normals.
struct FanInput {
  Eigen::Index ambient_dim = 0;
  std::vector<Cone> cones;
  std::vector<Vec> hyperplanes;
  bool from_hyperplanes = false;
};

inline FanInput fan_input_from_json(const json& j) {
  if (!j.is_object()) throw InputError("fan must be a JSON object");
  FanInput in;
  if (j.contains("hyperplanes")) {
    in.from_hyperplanes = true;
    const Eigen::Index n = j.contains("ambient_dim") ? dim_field(j, "ambient_dim") : -1;
    const auto& hs = j["hyperplanes"];
    if (!hs.is_array() || hs.empty()) throw InputError("'hyperplanes' must be a nonempty array");
    in.hyperplanes = vecs_from_json(hs, n >= 0 ? n : static_cast<Eigen::Index>(hs[0].size()), "hyperplane normal");
    in.ambient_dim = in.hyperplanes.front().size();
    return in;
  }
  in.ambient_dim = dim_field(j, "ambient_dim");
  if (!j.contains("cones") || !j["cones"].is_array()) throw InputError("fan is missing 'cones'");
  for (const auto& c : j["cones"]) in.cones.push_back(cone_from_json(c, in.ambient_dim));
  return in;
}

inline std::string describe(const FanViolation& v) {
  std::ostringstream s;
  s << v.message;
  return s.str();
}

/// Builds a validated fan; violations become FanInvariantError.
inline Fan fan_from_json(const json& j, const ValidateOptions& opts = {}) {
  FanInput in = fan_input_from_json(j);
  if (in.from_hyperplanes) return hyperplane_fan(in.hyperplanes, in.ambient_dim);
  FanValidation v = validate_fan(in.cones, opts);
  if (!v.ok()) {
    std::ostringstream s;
    s << "invalid fan";
    if (!v.violations.empty()) s << ": " << describe(v.violations.front());
    if (v.violations.size() > 1) s << " (+" << v.violations.size() - 1 << " more)";
    throw FanInvariantError(s.str());
  }
  return std::move(*v.fan);
}

inline Fan load_fan(const std::string& path, const ValidateOptions& opts = {}) {
  return fan_from_json(load_json_file(path), opts);
}

inline EGraph egraph_from_json(const json& j) {
  if (!j.is_object()) throw InputError("e-graph must be a JSON object");
  const Eigen::Index n = dim_field(j, "dim");
  if (!j.contains("vertices")) throw InputError("e-graph is missing 'vertices'");
  std::vector<Vec> vertices = vecs_from_json(j["vertices"], n, "vertex");
  std::vector<EGraph::Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw InputError("'edges' must be an array of [source, target] pairs");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          e[0].get<long long>() < 0 || e[1].get<long long>() < 0)
        throw InputError("edge must be a pair of nonnegative vertex indices");
      edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
  }
  double eps = 1.0;
  if (j.contains("epsilon")) {
    if (!j["epsilon"].is_number()) throw InputError("'epsilon' must be a number");
    eps = j["epsilon"].get<double>();
  }
  return EGraph::create(n, std::move(vertices), std::move(edges), eps);
}

inline json egraph_to_json(const EGraph& g) {
  json edges = json::array();
  for (const auto& [s, t] : g.edges()) edges.push_back({s, t});
  return json{{"dim", g.dim()}, {"vertices", vecs_to_json(g.vertices())}, {"edges", edges}, {"epsilon", g.epsilon()}};
}

/// Header t,x1..xn,dx1..dxn; full round-trip precision.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",dx" << i;
  out << "\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < traj.size(); ++j) {
    out << traj.times[j];
    for (Eigen::Index i = 0; i < n; ++i) out << "," << traj.states[j](i);
    for (Eigen::Index i = 0; i < n; ++i) out << "," << traj.derivatives[j](i);
    out << "\n";
  }
}

inline Trajectory read_trajectory_csv(std::istream& in, const std::string& source = "<trajectory>") {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[0] != "t" || (header.size() - 1) % 2 != 0)
    throw InputError(source + ":1: header must be t,x1,...,xn,dx1,...,dxn");
  const std::size_t n = (header.size() - 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (header[1 + i] != "x" + std::to_string(i + 1) || header[1 + n + i] != "dx" + std::to_string(i + 1))
      throw InputError(source + ":1: header must be t,x1,...,xn,dx1,...,dxn");
  }
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw InputError(source + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      vals.push_back(v);
    }
    if (vals.size() != header.size())
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " columns");
    traj.times.push_back(vals[0]);
    traj.states.push_back(Eigen::Map<const Vec>(vals.data() + 1, static_cast<Eigen::Index>(n)));
    traj.derivatives.push_back(Eigen::Map<const Vec>(vals.data() + 1 + n, static_cast<Eigen::Index>(n)));
  }
  traj.horizon = traj.times.empty() ? 0.0 : traj.times.back();
  return traj;
}

inline Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_trajectory_csv(in, path);
}

}  // namespace conefan::io

#endif  // CONEFAN_IO_HPP
