#pragma once

// The merit functional
//
//   Phi(x, y) = sum_u sum_v w_u w_v (f(u, y) - f(x, v))_+^2
//
// over quadrature nodes u of X and v of Y. Phi >= 0 everywhere and vanishes
// exactly at (grid) saddle points, so it doubles as a certificate and as an
// objective for finding saddles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "saddle/domain.hpp"
#include "saddle/errors.hpp"
#include "saddle/objective.hpp"

namespace saddle {

inline constexpr int kPhiResolution = 32;

inline double positive_part(double a) { return a > 0.0 ? a : 0.0; }

struct PhiContext {
  Objective objective;
  Domain X;
  Domain Y;
  QuadratureGrid x_grid;
  QuadratureGrid y_grid;
};

inline PhiContext make_phi_context(Objective f, Domain X, Domain Y, int resolution = kPhiResolution) {
  if (!X.convex() || !Y.convex())
    throw UnsupportedDomainError("phi: both domains must be convex (finite point sets are not)");
  require_dim(X.dimension(), f.dim_x(), "phi X");
  require_dim(Y.dimension(), f.dim_y(), "phi Y");
  auto gx = quadrature(X, resolution);
  auto gy = quadrature(Y, resolution);
  return PhiContext{std::move(f), std::move(X), std::move(Y), std::move(gx), std::move(gy)};
}

/// g(u, v) = f(u, y*) - f(x*, v)
inline double g_val(const PhiContext& ctx, ConstVec x_star, ConstVec y_star, ConstVec u, ConstVec v) {
  return evaluate(ctx.objective, u, y_star) - evaluate(ctx.objective, x_star, v);
}

/// h(u, v; x, y) = f(u, y) - f(x, v)
inline double h_val(const PhiContext& ctx, ConstVec x, ConstVec y, ConstVec u, ConstVec v) {
  return evaluate(ctx.objective, u, y) - evaluate(ctx.objective, x, v);
}

namespace detail {

// f(u, y) for every X node and f(x, v) for every Y node.
inline std::pair<Vector, Vector> phi_slices(const PhiContext& ctx, ConstVec x, ConstVec y) {
  Vector fu(ctx.x_grid.size()), fv(ctx.y_grid.size());
  for (std::size_t a = 0; a < fu.size(); ++a) fu[a] = evaluate(ctx.objective, ctx.x_grid.nodes[a], y);
  for (std::size_t b = 0; b < fv.size(); ++b) fv[b] = evaluate(ctx.objective, x, ctx.y_grid.nodes[b]);
  return {std::move(fu), std::move(fv)};
}

}  // namespace detail

inline double phi(const PhiContext& ctx, ConstVec x, ConstVec y) {
  require_dim(x.size(), ctx.objective.dim_x(), "phi x");
  require_dim(y.size(), ctx.objective.dim_y(), "phi y");
  const auto [fu, fv] = detail::phi_slices(ctx, x, y);
  const auto& wu = ctx.x_grid.weights;
  const auto& wv = ctx.y_grid.weights;
  double total = 0.0;
  for (std::size_t a = 0; a < fu.size(); ++a) {
    double inner = 0.0;
    for (std::size_t b = 0; b < fv.size(); ++b) {
      const double p = positive_part(fu[a] - fv[b]);
      inner += wv[b] * p * p;
    }
    total += wu[a] * inner;
  }
  return total;
}

/// Right derivative of t -> (a + t b)_+^2 at t = 0.
inline double plus_square_dderiv(double a, double b) { return 2.0 * positive_part(a) * b; }

struct VariationCheck {
  double lhs = 0.0;  // Phi(x*, y*)
  double rhs = 0.0;  // sum w_u w_v g_+(u, v) h(u, v; x, y)
  bool holds = false;
};

/// First-order optimality of a Phi minimizer, probed in direction (x, y).
inline VariationCheck variation_inequality_check(const PhiContext& ctx, ConstVec x_star, ConstVec y_star,
                                                 ConstVec x, ConstVec y, double tol = 1e-6) {
  const auto [gu, gv] = detail::phi_slices(ctx, x_star, y_star);
  const auto [hu, hv] = detail::phi_slices(ctx, x, y);
  const auto& wu = ctx.x_grid.weights;
  const auto& wv = ctx.y_grid.weights;
  VariationCheck r;
  r.lhs = phi(ctx, x_star, y_star);
  for (std::size_t a = 0; a < gu.size(); ++a) {
    double inner = 0.0;
    for (std::size_t b = 0; b < gv.size(); ++b) inner += wv[b] * positive_part(gu[a] - gv[b]) * (hu[a] - hv[b]);
    r.rhs += wu[a] * inner;
  }
  r.holds = r.lhs <= r.rhs + tol;
  return r;
}

/// max |h(u,v;x,y) + h(x,y;u,v)| over random quadruples. Zero for any
/// deterministic objective.
inline double skew_symmetry_check(const PhiContext& ctx, int probes, std::uint64_t seed) {
  if (probes < 1) throw InputError("skew_symmetry_check: probes must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Vector u = sample(ctx.X, rng), v = sample(ctx.Y, rng);
    const Vector x = sample(ctx.X, rng), y = sample(ctx.Y, rng);
    worst = std::max(worst, std::abs(h_val(ctx, x, y, u, v) + h_val(ctx, u, v, x, y)));
  }
  return worst;
}

/// Gradient of Phi using d/dt (a + t b)_+^2 = 2 a_+ b pointwise.
inline GradientPair phi_gradient(const PhiContext& ctx, ConstVec x, ConstVec y) {
  require_dim(x.size(), ctx.objective.dim_x(), "phi_gradient x");
  require_dim(y.size(), ctx.objective.dim_y(), "phi_gradient y");
  const auto [fu, fv] = detail::phi_slices(ctx, x, y);
  const auto& wu = ctx.x_grid.weights;
  const auto& wv = ctx.y_grid.weights;
  // coef_u[a] = sum_b w_u w_v 2 (.)_+ , coef_v[b] likewise; u-major order.
  Vector coef_u(fu.size(), 0.0), coef_v(fv.size(), 0.0);
  for (std::size_t a = 0; a < fu.size(); ++a)
    for (std::size_t b = 0; b < fv.size(); ++b) {
      const double c = wu[a] * wv[b] * 2.0 * positive_part(fu[a] - fv[b]);
      coef_u[a] += c;
      coef_v[b] += c;
    }
  GradientPair out{Vector(x.size(), 0.0), Vector(y.size(), 0.0)};
  Vector gx(x.size()), gy(y.size());
  for (std::size_t a = 0; a < fu.size(); ++a) {
    if (coef_u[a] == 0.0) continue;
    gradients_into(ctx.objective, ctx.x_grid.nodes[a], y, gx, gy);
    for (std::size_t j = 0; j < y.size(); ++j) out.grad_y[j] += coef_u[a] * gy[j];
  }
  for (std::size_t b = 0; b < fv.size(); ++b) {
    if (coef_v[b] == 0.0) continue;
    gradients_into(ctx.objective, x, ctx.y_grid.nodes[b], gx, gy);
    for (std::size_t i = 0; i < x.size(); ++i) out.grad_x[i] -= coef_v[b] * gx[i];
  }
  return out;
}

struct PhiSolverParams {
  double step0 = 1.0;
  double shrink = 0.5;
  double armijo = 0.5;
  int max_iters = 5000;
  double tol = 1e-8;
  double min_step = 1e-20;
  // When > 0 and the solver fails, run the sampled convexity diagnostic to
  // tell a numerical failure from a violated hypothesis.
  int diagnose_samples = 0;
  std::uint64_t seed = 0;
};

struct TrajectoryPoint {
  int iter = 0;
  Vector x;
  Vector y;
  double phi = 0.0;
};

enum class StopReason { Converged, StepCollapse, MaxIterations };
enum class FailureKind { None, Numerical, HypothesisViolated };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Converged: return "converged";
    case StopReason::StepCollapse: return "step_collapse";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "?";
}

inline const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::None: return "none";
    case FailureKind::Numerical: return "numerical";
    case FailureKind::HypothesisViolated: return "hypothesis_violated";
  }
  return "?";
}

struct PhiSolveResult {
  Vector x_star;
  Vector y_star;
  double phi_value = 0.0;
  int iterations = 0;
  std::vector<TrajectoryPoint> trajectory;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIterations;
  FailureKind failure = FailureKind::None;
  std::optional<ConvexityReport> diagnosis;
};

/// Projected gradient descent on Phi with Armijo backtracking. The start is
/// projected onto X x Y first.
inline PhiSolveResult minimize_phi(const PhiContext& ctx, ConstVec start_x, ConstVec start_y,
                                   const PhiSolverParams& params = {}) {
  if (!(params.shrink > 0.0 && params.shrink < 1.0)) throw InputError("minimize_phi: shrink must be in (0,1)");
  if (!(params.step0 > 0.0)) throw InputError("minimize_phi: step0 must be positive");
  PhiSolveResult r;
  Vector x = project(ctx.X, start_x);
  Vector y = project(ctx.Y, start_y);
  double value = phi(ctx, x, y);
  r.trajectory.push_back({0, x, y, value});

  int it = 0;
  bool stalled = false;
  while (value > params.tol && it < params.max_iters) {
    const auto grad = phi_gradient(ctx, x, y);
    bool accepted = false;
    for (double step = params.step0; step >= params.min_step; step *= params.shrink) {
      Vector nx = project(ctx.X, axpy(x, -step, grad.grad_x));
      Vector ny = project(ctx.Y, axpy(y, -step, grad.grad_y));
      const double decrease = dot(grad.grad_x, subtract(x, nx)) + dot(grad.grad_y, subtract(y, ny));
      if (decrease <= 0.0) break;  // projected step is not a descent direction
      const double nv = phi(ctx, nx, ny);
      if (nv <= value - params.armijo * decrease) {
        x = std::move(nx);
        y = std::move(ny);
        value = nv;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    ++it;
    r.trajectory.push_back({it, x, y, value});
  }

  r.x_star = std::move(x);
  r.y_star = std::move(y);
  r.phi_value = value;
  r.iterations = it;
  r.converged = value <= params.tol;
  r.stop_reason = r.converged ? StopReason::Converged : stalled ? StopReason::StepCollapse : StopReason::MaxIterations;
  if (!r.converged) {
    r.failure = FailureKind::Numerical;
    if (params.diagnose_samples > 0) {
      r.diagnosis = check_convex_concave(ctx.objective, ctx.X, ctx.Y, params.diagnose_samples, params.seed, 1e-9);
      if (!r.diagnosis->no_violation_found()) r.failure = FailureKind::HypothesisViolated;
    }
  }
  return r;
}

}  // namespace saddle
