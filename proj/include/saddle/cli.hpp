#pragma once

// Command-line driver. Kept in a header so tests can run commands in-process.
//
//   saddle gap|verify|phi|solve-phi|solve-quadratic PROBLEM.json [flags]
//
// Exit codes: 0 pass, 1 fail, 2 input error, 3 degenerate game.

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saddle/domain.hpp"
#include "saddle/minimax.hpp"
#include "saddle/objective.hpp"
#include "saddle/phi.hpp"
#include "saddle/problem.hpp"
#include "saddle/quadratic.hpp"
#include "saddle/report.hpp"

namespace saddle::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2, kDegenerate = 3 };

struct Flags {
  std::string command;
  std::string problem_path;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<int> resolution;
  std::string trace_path;
};

namespace detail {

inline json flags_to_json(const Flags& f) {
  json j = json::object();
  if (!f.x.empty()) j["x"] = f.x;
  if (!f.y.empty()) j["y"] = f.y;
  if (f.resolution) j["resolution"] = *f.resolution;
  if (!f.trace_path.empty()) j["trace"] = f.trace_path;
  return j;
}

inline int grid_resolution(const Flags& flags, const ProblemFile& p, std::size_t dim) {
  if (flags.resolution) return *flags.resolution;
  if (p.options.resolution) return *p.options.resolution;
  return default_resolution(dim);
}

inline const Domain& require_y(const ProblemFile& p, const std::string& cmd) {
  if (!p.domain_y) throw InputError(cmd + ": problem has no domain_y (quadratic games use solve-quadratic)");
  return *p.domain_y;
}

inline void require_point(const std::vector<double>& v, const char* flag, const std::string& cmd) {
  if (v.empty()) throw InputError(cmd + ": missing " + std::string(flag));
}

struct Outcome {
  json results;
  int code = kPass;
};

inline const char* status_of(int code) {
  switch (code) {
    case kPass: return "pass";
    case kFail: return "fail";
    case kDegenerate: return "degenerate";
    default: return "error";
  }
}

inline Outcome cmd_gap(const Flags& flags, const ProblemFile& p, std::ostream& err) {
  const Objective f = build_objective(p.objective);
  const Domain& Y = require_y(p, "gap");
  const int res = grid_resolution(flags, p, std::max(p.domain_x.dimension(), Y.dimension()));
  err << "gap: grid minimax at resolution " << res << "\n";
  const auto est = grid_minimax(f, p.domain_x, Y, res);
  const bool weak = weak_duality_check(est);
  Outcome o;
  o.results = to_json(est);
  o.results["weak_duality"] = weak;
  o.code = weak ? kPass : kFail;
  return o;
}

inline Outcome cmd_verify(const Flags& flags, const ProblemFile& p, std::ostream& err) {
  const Objective f = build_objective(p.objective);
  const Domain& Y = require_y(p, "verify");
  require_point(flags.x, "--x", "verify");
  require_point(flags.y, "--y", "verify");
  const int res = grid_resolution(flags, p, std::max(p.domain_x.dimension(), Y.dimension()));
  err << "verify: checking saddle inequalities at resolution " << res << "\n";
  const auto c = verify_saddle(f, flags.x, flags.y, p.domain_x, Y, res, p.options.tol.value_or(kVerifyTol));
  Outcome o;
  o.results = to_json(c);
  o.results["pairwise_residual"] = saddle_pairwise_residual(f, flags.x, flags.y, p.domain_x, Y, res);
  o.code = c.verified ? kPass : kFail;
  return o;
}

inline PhiContext phi_context(const ProblemFile& p, const char* cmd) {
  return make_phi_context(build_objective(p.objective), p.domain_x, require_y(p, cmd),
                          p.options.phi_resolution.value_or(kPhiResolution));
}

inline Outcome cmd_phi(const Flags& flags, const ProblemFile& p, std::ostream& err) {
  const auto ctx = phi_context(p, "phi");
  require_point(flags.x, "--x", "phi");
  require_point(flags.y, "--y", "phi");
  if (!contains(ctx.X, flags.x) || !contains(ctx.Y, flags.y)) throw InputError("phi: point is not in X x Y");
  err << "phi: evaluating on " << ctx.x_grid.size() << " x " << ctx.y_grid.size() << " nodes\n";
  const double value = phi(ctx, flags.x, flags.y);
  const double tol = p.options.tol.value_or(p.options.solver.value_or(SolverOptions{}).tol);
  Outcome o;
  o.results = {{"x", flags.x},
               {"y", flags.y},
               {"phi", value},
               {"phi_resolution", ctx.x_grid.resolution},
               {"tol", tol},
               {"certified", value <= tol}};
  o.code = value <= tol ? kPass : kFail;
  return o;
}

inline Outcome cmd_solve_phi(const Flags& flags, const ProblemFile& p, std::ostream& err) {
  const auto ctx = phi_context(p, "solve-phi");
  const Vector x0 = flags.x.empty() ? interior_point(ctx.X) : flags.x;
  const Vector y0 = flags.y.empty() ? interior_point(ctx.Y) : flags.y;
  require_dim(x0.size(), ctx.X.dimension(), "solve-phi --x");
  require_dim(y0.size(), ctx.Y.dimension(), "solve-phi --y");
  const SolverOptions so = p.options.solver.value_or(SolverOptions{});
  PhiSolverParams params;
  params.step0 = so.step0;
  params.shrink = so.shrink;
  params.max_iters = so.max_iters;
  params.tol = so.tol;
  params.diagnose_samples = p.options.convexity_samples.value_or(0);
  params.seed = p.options.seed.value_or(0);
  err << "solve-phi: projected gradient descent on Phi\n";
  const auto result = minimize_phi(ctx, x0, y0, params);
  err << "solve-phi: " << result.iterations << " iterations, phi = " << format_double(result.phi_value) << "\n";

  if (!flags.trace_path.empty()) {
    std::ofstream trace(flags.trace_path);
    if (!trace) throw InputError("solve-phi: cannot write trace file " + flags.trace_path);
    write_trajectory(trace, result);
    if (!trace) throw InputError("solve-phi: failed writing trace file " + flags.trace_path);
  }

  const int res = grid_resolution(flags, p, std::max(ctx.X.dimension(), ctx.Y.dimension()));
  const auto check = verify_saddle(ctx.objective, result.x_star, result.y_star, ctx.X, ctx.Y, res,
                                   p.options.tol.value_or(1e-3));
  Outcome o;
  o.results = to_json(result);
  o.results["verification"] = to_json(check);
  o.code = result.converged && check.verified ? kPass : kFail;
  return o;
}

inline Outcome cmd_solve_quadratic(const Flags& flags, const ProblemFile& p, std::ostream& err) {
  if (!p.is_quadratic()) throw InputError("solve-quadratic: objective must be quadratic");
  const auto game = build_quadratic_game(p);
  QuadraticSolveParams params;
  params.tol = p.options.tol.value_or(1e-3);
  params.cross_check_resolution =
      flags.resolution.value_or(p.options.cross_check_resolution.value_or(kCrossCheckResolution));
  err << "solve-quadratic: maximizing the value function over X\n";
  const auto report = solve_quadratic_game(game, params);
  Outcome o;
  o.results = to_json(report);
  if (report.degenerate) {
    o.code = kDegenerate;
    return o;
  }
  if (!report.chain_ok) {
    o.code = kFail;
    return o;
  }
  err << "solve-quadratic: verifying the saddle chain\n";
  const auto chain = verify_saddle_chain(game, report, params.cross_check_resolution, params.tol);
  o.results["chain"] = to_json(chain);
  o.code = chain.ok ? kPass : kFail;
  return o;
}

}  // namespace detail

inline int run_command(const Flags& flags, std::ostream& out, std::ostream& err) {
  try {
    const ProblemFile p = load_problem(flags.problem_path);
    detail::Outcome o;
    if (flags.command == "gap") o = detail::cmd_gap(flags, p, err);
    else if (flags.command == "verify") o = detail::cmd_verify(flags, p, err);
    else if (flags.command == "phi") o = detail::cmd_phi(flags, p, err);
    else if (flags.command == "solve-phi") o = detail::cmd_solve_phi(flags, p, err);
    else if (flags.command == "solve-quadratic") o = detail::cmd_solve_quadratic(flags, p, err);
    else throw InputError("unknown command " + flags.command);

    json report;
    report["command"] = flags.command;
    report["inputs"] = {{"problem_path", flags.problem_path},
                        {"problem", serialize_problem(p)},
                        {"flags", detail::flags_to_json(flags)}};
    report["results"] = std::move(o.results);
    report["status"] = detail::status_of(o.code);
    report["versions"] = {{"library", kLibraryVersion}, {"format", kReportFormatVersion}};
    out << render_report(report);
    return o.code;
  } catch (const ParseError& e) {
    err << "error: " << flags.problem_path << ": " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const UnsupportedDomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << "\n";
    return kFail;
  }
}

/// Parses argv and dispatches. argv[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saddle-point certification and minimax computation for convex-concave games"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"gap", "Grid max-min and min-max values and the weak-duality check"},
      {"verify", "Check whether --x/--y is a saddle point on the grid"},
      {"phi", "Evaluate the Phi residual at --x/--y"},
      {"solve-phi", "Minimize Phi from --x/--y and verify the result"},
      {"solve-quadratic", "Solve a quadratic game and verify its saddle chain"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("problem", flags.problem_path, "Problem file (JSON)")->required();
    sub->add_option("--resolution", flags.resolution, "Grid nodes per axis");
    if (std::string(name) == "verify" || std::string(name) == "phi" || std::string(name) == "solve-phi") {
      sub->add_option("--x", flags.x, "Point in X (comma separated)")->delimiter(',');
      sub->add_option("--y", flags.y, "Point in Y (comma separated)")->delimiter(',');
    }
    if (std::string(name) == "solve-phi") sub->add_option("--trace", flags.trace_path, "Write the trajectory as CSV");
    sub->callback([&flags, name = std::string(name)] { flags.command = name; });
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return run_command(flags, out, err);
}

}  // namespace saddle::cli
