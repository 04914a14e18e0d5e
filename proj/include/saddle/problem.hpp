#pragma once

// Problem files: strict JSON with an objective, domain_x, optional domain_y
// and options. Unknown keys are errors.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "saddle/domain.hpp"
#include "saddle/errors.hpp"
#include "saddle/objective.hpp"
#include "saddle/quadratic.hpp"

namespace saddle {

using json = nlohmann::ordered_json;

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

struct ObjectiveRecord {
  std::string kind;  // "bilinear" | "quadratic"
  // bilinear
  Matrix M;
  Vector a, b;
  double c = 0.0;
  // quadratic
  Matrix S, A;
  std::string g = "zero";  // "zero" | "sumsq" | "linear"
  Vector g_coef;

  friend bool operator==(const ObjectiveRecord&, const ObjectiveRecord&) = default;
};

struct SolverOptions {
  double step0 = 1.0;
  double shrink = 0.5;
  int max_iters = 5000;
  double tol = 1e-8;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct ProblemOptions {
  std::optional<int> resolution;
  std::optional<int> phi_resolution;
  std::optional<int> cross_check_resolution;
  std::optional<double> tol;
  std::optional<SolverOptions> solver;
  std::optional<std::uint64_t> seed;
  std::optional<int> convexity_samples;

  friend bool operator==(const ProblemOptions&, const ProblemOptions&) = default;
};

struct ProblemFile {
  ObjectiveRecord objective;
  Domain domain_x = Domain::simplex(1);
  std::optional<Domain> domain_y;
  ProblemOptions options;

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;

  bool is_quadratic() const { return objective.kind == "quadratic"; }
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items())
    if (!keys.count(k)) throw ParseError(where + "." + k + ": unknown field");
}

inline const json& require(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ParseError(where + "." + key + ": missing field");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

inline Vector as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline Matrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a nonempty array of rows");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < j.size(); ++i) rows.push_back(as_vector(j[i], where + "[" + std::to_string(i) + "]"));
  try {
    return Matrix::from_rows(rows);
  } catch (const InputError&) {
    throw ParseError(where + ": rows have different lengths");
  }
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (const auto& r : m.to_rows()) rows.push_back(r);
  return rows;
}

}  // namespace detail

inline Domain parse_domain(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const auto& kind_j = detail::require(j, where, "kind");
  if (!kind_j.is_string()) throw ParseError(where + ".kind: expected a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "box") {
      detail::reject_unknown(j, where, {"kind", "lower", "upper"});
      return Domain::box(detail::as_vector(detail::require(j, where, "lower"), where + ".lower"),
                         detail::as_vector(detail::require(j, where, "upper"), where + ".upper"));
    }
    if (kind == "ball") {
      detail::reject_unknown(j, where, {"kind", "center", "radius"});
      return Domain::ball(detail::as_vector(detail::require(j, where, "center"), where + ".center"),
                          detail::as_number(detail::require(j, where, "radius"), where + ".radius"));
    }
    if (kind == "simplex") {
      detail::reject_unknown(j, where, {"kind", "dim"});
      const int dim = detail::as_int(detail::require(j, where, "dim"), where + ".dim");
      if (dim < 1) throw ParseError(where + ".dim: must be >= 1");
      return Domain::simplex(static_cast<std::size_t>(dim));
    }
    if (kind == "points") {
      detail::reject_unknown(j, where, {"kind", "points"});
      const auto& pts = detail::require(j, where, "points");
      if (!pts.is_array()) throw ParseError(where + ".points: expected an array");
      std::vector<Vector> out;
      for (std::size_t i = 0; i < pts.size(); ++i)
        out.push_back(detail::as_vector(pts[i], where + ".points[" + std::to_string(i) + "]"));
      return Domain::points(std::move(out));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(where + ": " + e.what());
  }
  throw ParseError(where + ".kind: unknown domain kind '" + kind + "'");
}

inline json domain_to_json(const Domain& d) {
  json j;
  j["kind"] = to_string(d.kind());
  switch (d.kind()) {
    case DomainKind::Box:
      j["lower"] = d.lower();
      j["upper"] = d.upper();
      break;
    case DomainKind::Ball:
      j["center"] = d.center();
      j["radius"] = d.radius();
      break;
    case DomainKind::Simplex: j["dim"] = d.dimension(); break;
    case DomainKind::FinitePointSet: j["points"] = d.point_set(); break;
  }
  return j;
}

inline ObjectiveRecord parse_objective(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const auto& kind_j = detail::require(j, where, "kind");
  if (!kind_j.is_string()) throw ParseError(where + ".kind: expected a string");
  ObjectiveRecord r;
  r.kind = kind_j.get<std::string>();
  if (r.kind == "bilinear") {
    detail::reject_unknown(j, where, {"kind", "M", "a", "b", "c"});
    r.M = detail::as_matrix(detail::require(j, where, "M"), where + ".M");
    r.a = j.contains("a") ? detail::as_vector(j["a"], where + ".a") : Vector(r.M.rows(), 0.0);
    r.b = j.contains("b") ? detail::as_vector(j["b"], where + ".b") : Vector(r.M.cols(), 0.0);
    r.c = j.contains("c") ? detail::as_number(j["c"], where + ".c") : 0.0;
    if (r.a.size() != r.M.rows()) throw ParseError(where + ".a: length must equal rows of M");
    if (r.b.size() != r.M.cols()) throw ParseError(where + ".b: length must equal columns of M");
    return r;
  }
  if (r.kind == "quadratic") {
    detail::reject_unknown(j, where, {"kind", "S", "A", "g", "g_coef"});
    r.S = detail::as_matrix(detail::require(j, where, "S"), where + ".S");
    r.A = detail::as_matrix(detail::require(j, where, "A"), where + ".A");
    if (j.contains("g")) {
      if (!j["g"].is_string()) throw ParseError(where + ".g: expected a string");
      r.g = j["g"].get<std::string>();
    }
    if (r.g != "zero" && r.g != "sumsq" && r.g != "linear")
      throw ParseError(where + ".g: expected \"zero\", \"sumsq\" or \"linear\"");
    if (j.contains("g_coef")) r.g_coef = detail::as_vector(j["g_coef"], where + ".g_coef");
    if (r.g == "zero" && !r.g_coef.empty()) throw ParseError(where + ".g_coef: not used by g = zero");
    if (r.g == "sumsq" && r.g_coef.size() > 1) throw ParseError(where + ".g_coef: sumsq takes one scale");
    if (r.g == "linear" && r.g_coef.size() != r.A.cols())
      throw ParseError(where + ".g_coef: linear g needs one coefficient per column of A");
    return r;
  }
  throw ParseError(where + ".kind: unknown objective kind '" + r.kind + "'");
}

inline json objective_to_json(const ObjectiveRecord& r) {
  json j;
  j["kind"] = r.kind;
  if (r.kind == "bilinear") {
    j["M"] = detail::to_json(r.M);
    j["a"] = r.a;
    j["b"] = r.b;
    j["c"] = r.c;
  } else {
    j["S"] = detail::to_json(r.S);
    j["A"] = detail::to_json(r.A);
    j["g"] = r.g;
    if (!r.g_coef.empty()) j["g_coef"] = r.g_coef;
  }
  return j;
}

inline ProblemOptions parse_options(const json& j) {
  const std::string where = "options";
  detail::reject_unknown(j, where,
                         {"resolution", "phi_resolution", "cross_check_resolution", "tol", "solver", "seed",
                          "convexity_samples"});
  ProblemOptions o;
  auto positive_int = [&](const char* key) -> std::optional<int> {
    if (!j.contains(key)) return std::nullopt;
    const int v = detail::as_int(j[key], where + "." + key);
    if (v < 1) throw ParseError(where + "." + key + ": must be >= 1");
    return v;
  };
  o.resolution = positive_int("resolution");
  o.phi_resolution = positive_int("phi_resolution");
  o.cross_check_resolution = positive_int("cross_check_resolution");
  if (j.contains("tol")) {
    o.tol = detail::as_number(j["tol"], where + ".tol");
    if (!(*o.tol >= 0.0)) throw ParseError(where + ".tol: must be nonnegative");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    detail::reject_unknown(s, where + ".solver", {"step0", "shrink", "max_iters", "tol"});
    SolverOptions so;
    if (s.contains("step0")) so.step0 = detail::as_number(s["step0"], where + ".solver.step0");
    if (s.contains("shrink")) so.shrink = detail::as_number(s["shrink"], where + ".solver.shrink");
    if (s.contains("max_iters")) so.max_iters = detail::as_int(s["max_iters"], where + ".solver.max_iters");
    if (s.contains("tol")) so.tol = detail::as_number(s["tol"], where + ".solver.tol");
    if (!(so.step0 > 0.0)) throw ParseError(where + ".solver.step0: must be positive");
    if (!(so.shrink > 0.0 && so.shrink < 1.0)) throw ParseError(where + ".solver.shrink: must be in (0, 1)");
    if (so.max_iters < 0) throw ParseError(where + ".solver.max_iters: must be >= 0");
    o.solver = so;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError(where + ".seed: expected a nonnegative integer");
    o.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("convexity_samples")) {
    o.convexity_samples = detail::as_int(j["convexity_samples"], where + ".convexity_samples");
    if (*o.convexity_samples < 0) throw ParseError(where + ".convexity_samples: must be >= 0");
    if (*o.convexity_samples > 0 && !o.seed)
      throw ParseError(where + ".seed: required when convexity_samples is set");
  }
  return o;
}

inline json options_to_json(const ProblemOptions& o) {
  json j = json::object();
  if (o.resolution) j["resolution"] = *o.resolution;
  if (o.phi_resolution) j["phi_resolution"] = *o.phi_resolution;
  if (o.cross_check_resolution) j["cross_check_resolution"] = *o.cross_check_resolution;
  if (o.tol) j["tol"] = *o.tol;
  if (o.solver) {
    j["solver"] = {{"step0", o.solver->step0},
                   {"shrink", o.solver->shrink},
                   {"max_iters", o.solver->max_iters},
                   {"tol", o.solver->tol}};
  }
  if (o.seed) j["seed"] = *o.seed;
  if (o.convexity_samples) j["convexity_samples"] = *o.convexity_samples;
  return j;
}

/// Builds and cross-validates a problem from parsed JSON.
inline ProblemFile parse_problem(const json& j) {
  detail::reject_unknown(j, "problem", {"objective", "domain_x", "domain_y", "options"});
  ProblemFile p;
  p.objective = parse_objective(detail::require(j, "problem", "objective"), "objective");
  p.domain_x = parse_domain(detail::require(j, "problem", "domain_x"), "domain_x");
  if (j.contains("domain_y")) p.domain_y = parse_domain(j["domain_y"], "domain_y");
  if (j.contains("options")) p.options = parse_options(j["options"]);

  if (p.is_quadratic()) {
    if (p.domain_y) throw ParseError("domain_y: quadratic games range y over all of R^k; omit domain_y");
    if (p.objective.A.cols() != p.domain_x.dimension())
      throw ParseError("objective.A: columns must equal dimension of domain_x");
    if (p.objective.S.rows() != p.objective.S.cols()) throw ParseError("objective.S: must be square");
    if (p.objective.A.rows() != p.objective.S.rows()) throw ParseError("objective.A: rows must equal size of S");
  } else {
    if (!p.domain_y) throw ParseError("problem.domain_y: missing field");
    if (p.objective.M.rows() != p.domain_x.dimension())
      throw ParseError("objective.M: rows must equal dimension of domain_x");
    if (p.objective.M.cols() != p.domain_y->dimension())
      throw ParseError("objective.M: columns must equal dimension of domain_y");
  }
  return p;
}

inline ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_problem(j);
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open problem file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

inline json serialize_problem(const ProblemFile& p) {
  json j;
  j["objective"] = objective_to_json(p.objective);
  j["domain_x"] = domain_to_json(p.domain_x);
  if (p.domain_y) j["domain_y"] = domain_to_json(*p.domain_y);
  j["options"] = options_to_json(p.options);
  return j;
}

inline Objective build_objective(const ObjectiveRecord& r) {
  if (r.kind == "bilinear") return Objective::bilinear(r.M, r.a, r.b, r.c);
  return Objective::quadratic(QuadraticPayoff{r.S, r.A, [&] {
                                                if (r.g == "sumsq")
                                                  return ConvexTerm::sum_squares(r.g_coef.empty() ? 1.0 : r.g_coef[0]);
                                                if (r.g == "linear") return ConvexTerm::linear(r.g_coef);
                                                return ConvexTerm::zero();
                                              }()});
}

inline QuadraticGameSpec build_quadratic_game(const ProblemFile& p) {
  const Objective f = build_objective(p.objective);
  const auto* q = f.as_quadratic();
  if (!q) throw InputError("problem is not a quadratic game");
  return make_quadratic_game(q->S, q->A, q->g, p.domain_x);
}

}  // namespace saddle
