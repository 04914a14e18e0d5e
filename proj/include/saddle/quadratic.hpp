#pragma once

// Quadratic games f(x, y) = 1/2 y^T S y - y^T A x - g(x) with y ranging over
// all of R^k. For fixed x the inner problem is a PSD quadratic: finite iff
// A x lies in img S, in which case its minimizer in img S is S^+ A x and has
// norm at most C ||A|| / sigma_min(S), C = max_{x in X} ||x||. Restricting y
// to the ball of that radius makes the game compact, and the outer problem
// becomes maximizing the concave value function
//
//   v(x) = -1/2 (A x)^T S^+ (A x) - g(x)     over X0 = {x in X : A x in img S}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "saddle/domain.hpp"
#include "saddle/minimax.hpp"
#include "saddle/objective.hpp"
#include "saddle/spectral.hpp"

namespace saddle {

inline constexpr double kPsdRelTol = 1e-10;
inline constexpr int kCrossCheckResolution = 41;

/// S = 0 with A != 0: no compactification radius exists.
class DegenerateGameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadraticGameSpec {
  QuadraticPayoff payoff;
  Domain X;

  const Matrix& S() const { return payoff.S; }
  const Matrix& A() const { return payoff.A; }
  const ConvexTerm& g() const { return payoff.g; }
  std::size_t dim_x() const { return payoff.A.cols(); }
  std::size_t dim_y() const { return payoff.S.rows(); }

  Objective objective() const { return Objective::quadratic(payoff); }
};

/// Validates symmetry and semidefiniteness of S, shapes, and 0 in X.
inline QuadraticGameSpec make_quadratic_game(Matrix S, Matrix A, ConvexTerm g, Domain X) {
  const std::size_t k = S.rows();
  if (k == 0 || S.cols() != k) throw InputError("quadratic game: S must be square and nonempty");
  require_dim(A.rows(), k, "quadratic game: rows of A");
  require_dim(X.dimension(), A.cols(), "quadratic game: X vs columns of A");
  if (!X.convex()) throw UnsupportedDomainError("quadratic game: X must be convex");
  if (asymmetry(S) > kSymmetryTol * std::max(1.0, S.max_abs()))
    throw InputError("quadratic game: S is not symmetric");
  const auto spec = spectral_decompose(S);
  const double floor = -kPsdRelTol * std::max(1.0, spec.eigenvalues.front());
  if (spec.eigenvalues.back() < floor) throw InputError("quadratic game: S is not positive semidefinite");
  if (!contains(X, Vector(X.dimension(), 0.0), kMembershipTol)) throw InputError("quadratic game: 0 must lie in X");
  if (g.kind() == ConvexTerm::Kind::Linear) require_dim(g.coef().size(), A.cols(), "quadratic game: linear g");
  return QuadraticGameSpec{QuadraticPayoff{std::move(S), std::move(A), std::move(g)}, std::move(X)};
}

struct InnerMin {
  double value = 0.0;  // -inf when A x is not in img S
  std::optional<Vector> y_min;
  double bound = 0.0;  // C ||A|| / sigma_min
  bool bound_ok = true;
};

namespace detail {

inline double minimizer_bound(const QuadraticGameSpec& game, const SpectralData& spec) {
  if (game.A().is_zero()) return 0.0;
  if (spec.rank == 0) return std::numeric_limits<double>::infinity();
  return bounding_norm(game.X) * spectral_norm(game.A()) / spec.sigma_min_pos;
}

}  // namespace detail

/// inf over y in R^k of f(x, y), with the minimizer in img S when finite.
inline InnerMin inner_min(const QuadraticGameSpec& game, const SpectralData& spec, ConstVec x,
                          double image_tol = kImageTol) {
  require_dim(x.size(), game.dim_x(), "inner_min");
  const Vector ax = multiply(game.A(), x);
  InnerMin r;
  r.bound = detail::minimizer_bound(game, spec);
  if (!in_image(spec, ax, image_tol)) {
    r.value = -std::numeric_limits<double>::infinity();
    return r;
  }
  Vector y = spec.pseudo_inverse_apply(ax);
  r.value = -0.5 * dot(ax, y) - game.g().value(x);
  r.bound_ok = norm(y) <= r.bound + 1e-8;
  r.y_min = std::move(y);
  return r;
}

/// R = C ||A|| / sigma_min(S); 0 when A = 0.
inline double ball_radius(const QuadraticGameSpec& game, const SpectralData& spec) {
  if (game.A().is_zero()) return 0.0;
  if (spec.rank == 0) throw DegenerateGameError("S = 0 with A != 0: inner infimum is -inf off ker A");
  return detail::minimizer_bound(game, spec);
}

struct QuadraticSolveParams {
  double tol = 1e-3;
  int cross_check_resolution = kCrossCheckResolution;
  int sweep_resolution = kCrossCheckResolution;
  int max_iters = 2000;
  double image_tol = kImageTol;
};

struct QuadraticSolveReport {
  Vector x_star;
  Vector y_star;
  double value_sup_inf = 0.0;
  double value_inf_sup = 0.0;
  double R = 0.0;
  int x0_members_checked = 0;  // points tested for A x in img S
  int x0_rejections = 0;
  int ascent_iterations = 0;
  bool ascent_stagnated = false;
  int cross_check_resolution = 0;
  bool degenerate = false;
  bool chain_ok = false;
  std::string diagnostics;
};

namespace detail {

// Ball grid for the compactified y-domain; a single node when R = 0.
inline std::vector<Vector> ball_nodes(std::size_t k, double R, int resolution) {
  if (!(R > 0.0)) return {Vector(k, 0.0)};
  return search_nodes(Domain::ball(Vector(k, 0.0), R), resolution);
}

struct ValueFunction {
  const QuadraticGameSpec& game;
  const SpectralData& spec;
  double image_tol;
  int* checked;

  // v(x), or nullopt when x is outside X0.
  std::optional<double> operator()(ConstVec x) const {
    ++*checked;
    const auto r = inner_min(game, spec, x, image_tol);
    if (!r.y_min) return std::nullopt;
    return r.value;
  }

  Vector supergradient(ConstVec x) const {
    const Vector ax = multiply(game.A(), x);
    const Vector y = spec.pseudo_inverse_apply(ax);
    Vector grad = multiply_transposed(game.A(), y);
    const Vector gg = game.g().gradient(x);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = -grad[i] - gg[i];
    return grad;
  }
};

}  // namespace detail

/// Maximizes v over X0 (grid sweep seeding projected supergradient ascent),
/// then cross-checks against the min-max of f over X x B_R on a grid.
inline QuadraticSolveReport solve_quadratic_game(const QuadraticGameSpec& game,
                                                 const QuadraticSolveParams& params = {}) {
  const auto spec = spectral_decompose(game.S());
  QuadraticSolveReport r;
  r.cross_check_resolution = params.cross_check_resolution;
  detail::ValueFunction v{game, spec, params.image_tol, &r.x0_members_checked};

  // Sweep. The origin is always in X0 and goes last so grid ties win.
  auto sweep = search_nodes(game.X, default_resolution(game.dim_x(), params.sweep_resolution));
  sweep.emplace_back(game.dim_x(), 0.0);
  Vector x;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& node : sweep) {
    const auto val = v(node);
    if (!val) {
      ++r.x0_rejections;
      continue;
    }
    if (*val > best) {
      best = *val;
      x = node;
    }
  }

  // Projected supergradient ascent with Armijo backtracking.
  double step = 1.0;
  for (int it = 0; it < params.max_iters; ++it) {
    const Vector grad = v.supergradient(x);
    bool accepted = false;
    Vector next;
    for (double s = std::min(2.0 * step, 1e6); s >= 1e-16; s *= 0.5) {
      next = project(game.X, axpy(x, s, grad));
      const auto val = v(next);
      if (!val) {
        ++r.x0_rejections;
        continue;
      }
      const double gain = dot(grad, subtract(next, x));
      if (*val >= best + 0.5 * gain) {
        best = *val;
        step = s;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      r.ascent_stagnated = true;
      break;
    }
    r.ascent_iterations = it + 1;
    const double moved = distance(next, x);
    x = std::move(next);
    if (moved <= 1e-13 * std::max(1.0, norm(x))) break;
  }

  r.x_star = x;
  r.value_sup_inf = best;
  const auto inner = inner_min(game, spec, x, params.image_tol);
  r.y_star = inner.y_min.value_or(Vector(game.dim_y(), 0.0));
  if (!inner.bound_ok) r.diagnostics += "minimizer norm exceeds C||A||/sigma_min; ";
  if (r.ascent_stagnated) r.diagnostics += "ascent stagnated; ";

  try {
    r.R = ball_radius(game, spec);
  } catch (const DegenerateGameError& e) {
    r.degenerate = true;
    r.R = std::numeric_limits<double>::quiet_NaN();
    r.value_inf_sup = std::numeric_limits<double>::infinity();
    r.chain_ok = false;
    r.diagnostics += e.what();
    return r;
  }

  const Objective f = game.objective();
  auto xs = search_nodes(game.X, default_resolution(game.dim_x(), params.cross_check_resolution));
  auto ys = detail::ball_nodes(game.dim_y(), r.R, default_resolution(game.dim_y(), params.cross_check_resolution));
  xs.push_back(r.x_star);
  ys.push_back(r.y_star);
  const auto est = grid_minimax_on(f, xs, ys, params.cross_check_resolution);
  r.value_inf_sup = est.inf_sup;
  r.chain_ok = std::abs(r.value_sup_inf - r.value_inf_sup) <= params.tol;
  return r;
}

struct ChainCheck {
  double min_max = 0.0;             // min over B_R grid of max over X grid of f
  double max_at_y_star = 0.0;       // max over X grid of f(., y*)
  double value = 0.0;               // f(x*, y*)
  double min_at_x_star = 0.0;       // min over B_R grid of f(x*, .)
  double max_min_restricted = 0.0;  // max over X0 grid nodes of inf_y f(x, y)
  int x0_nodes = 0;
  double tol = 0.0;
  bool ok = false;
};

/// Checks the saddle chain
///   min_y max_x f = max_x f(x, y*) = f(x*, y*) = min_y f(x*, y) = max_{x in X0} min_y f
/// on grids of X and B_R with x*, y* added as nodes.
inline ChainCheck verify_saddle_chain(const QuadraticGameSpec& game, const QuadraticSolveReport& report,
                                      int resolution, double tol) {
  if (!report.chain_ok) throw InputError("verify_saddle_chain: report does not satisfy the minimax equality");
  const auto spec = spectral_decompose(game.S());
  const Objective f = game.objective();
  auto xs = search_nodes(game.X, default_resolution(game.dim_x(), resolution));
  auto ys = detail::ball_nodes(game.dim_y(), report.R, default_resolution(game.dim_y(), resolution));
  xs.push_back(report.x_star);
  ys.push_back(report.y_star);

  ChainCheck c;
  c.tol = tol;
  c.min_max = grid_minimax_on(f, xs, ys, resolution).inf_sup;
  c.value = evaluate(f, report.x_star, report.y_star);
  c.max_at_y_star = -std::numeric_limits<double>::infinity();
  for (const auto& x : xs) c.max_at_y_star = std::max(c.max_at_y_star, evaluate(f, x, report.y_star));
  c.min_at_x_star = std::numeric_limits<double>::infinity();
  for (const auto& y : ys) c.min_at_x_star = std::min(c.min_at_x_star, evaluate(f, report.x_star, y));
  c.max_min_restricted = -std::numeric_limits<double>::infinity();
  for (const auto& x : xs) {
    const auto inner = inner_min(game, spec, x);
    if (!inner.y_min) continue;
    ++c.x0_nodes;
    c.max_min_restricted = std::max(c.max_min_restricted, inner.value);
  }
  c.ok = true;
  for (double m : {c.min_max, c.max_at_y_star, c.min_at_x_star, c.max_min_restricted})
    c.ok = c.ok && std::abs(m - c.value) <= tol;
  return c;
}

}  // namespace saddle
