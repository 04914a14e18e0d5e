#pragma once

// Both sides of the minimax equality on finite grids, weak duality, and
// saddle-point verification.
//
// sup/inf over a domain are realized as max/min over its search nodes: the
// midpoint quadrature nodes followed by the domain's extreme points (box
// vertices, ball poles, simplex vertices). Candidate points are appended
// after those. Ties go to the lowest node index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saddle/domain.hpp"
#include "saddle/objective.hpp"

namespace saddle {

inline constexpr double kDualitySlack = 1e-9;
inline constexpr double kVerifyTol = 1e-6;

/// Per-axis resolution keeping total node count near 101^2 above two dims.
inline int default_resolution(std::size_t dim, int base = 101) {
  if (dim <= 2) return base;
  return static_cast<int>(std::ceil(std::pow(static_cast<double>(base), 2.0 / static_cast<double>(dim))));
}

inline std::vector<Vector> search_nodes(const Domain& d, int resolution) {
  std::vector<Vector> nodes = quadrature(d, resolution).nodes;
  for (auto& v : extreme_points(d)) nodes.push_back(std::move(v));
  return nodes;
}

struct MinimaxEstimate {
  double sup_inf = 0.0;
  double inf_sup = 0.0;
  Vector outer_max_arg;  // x attaining sup_inf
  Vector outer_min_arg;  // y attaining inf_sup
  int resolution = 0;
  std::size_t x_nodes = 0;
  std::size_t y_nodes = 0;
  // Estimated distance of either grid value from its continuum counterpart:
  // Lx * rho_x + Ly * rho_y with L the largest partial-gradient norm seen on
  // the grid and rho the covering radius of each grid.
  double continuity_bound = 0.0;

  double gap() const { return inf_sup - sup_inf; }
};

namespace detail {

struct GridScan {
  double sup_inf, inf_sup;
  std::size_t arg_max, arg_min;
  double lip_x, lip_y;
};

// One pass over all node pairs. Row minima and column maxima are reduced in
// node order so the result does not depend on anything but the node lists.
inline GridScan scan_pairs(const Objective& f, std::span<const Vector> xs, std::span<const Vector> ys,
                           bool lipschitz) {
  if (xs.empty() || ys.empty()) throw InputError("grid_minimax: empty node set");
  GridScan s{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0, 0,
             0.0, 0.0};
  std::vector<double> col_max(ys.size(), -std::numeric_limits<double>::infinity());
  Vector gx(f.dim_x()), gy(f.dim_y());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = evaluate(f, xs[i], ys[j]);
      row_min = std::min(row_min, v);
      col_max[j] = std::max(col_max[j], v);
      if (lipschitz) {
        gradients_into(f, xs[i], ys[j], gx, gy);
        s.lip_x = std::max(s.lip_x, norm(gx));
        s.lip_y = std::max(s.lip_y, norm(gy));
      }
    }
    if (row_min > s.sup_inf) {
      s.sup_inf = row_min;
      s.arg_max = i;
    }
  }
  for (std::size_t j = 0; j < ys.size(); ++j)
    if (col_max[j] < s.inf_sup) {
      s.inf_sup = col_max[j];
      s.arg_min = j;
    }
  return s;
}

}  // namespace detail

/// max-min and min-max of f over explicit node lists.
inline MinimaxEstimate grid_minimax_on(const Objective& f, std::span<const Vector> xs,
                                       std::span<const Vector> ys, int resolution = 0) {
  const auto s = detail::scan_pairs(f, xs, ys, false);
  MinimaxEstimate e;
  e.sup_inf = s.sup_inf;
  e.inf_sup = s.inf_sup;
  e.outer_max_arg = xs[s.arg_max];
  e.outer_min_arg = ys[s.arg_min];
  e.resolution = resolution;
  e.x_nodes = xs.size();
  e.y_nodes = ys.size();
  return e;
}

inline MinimaxEstimate grid_minimax(const Objective& f, const Domain& X, const Domain& Y, int resolution) {
  if (resolution < 1) throw InputError("grid_minimax: resolution must be >= 1");
  require_dim(X.dimension(), f.dim_x(), "grid_minimax X");
  require_dim(Y.dimension(), f.dim_y(), "grid_minimax Y");
  const auto xs = search_nodes(X, resolution);
  const auto ys = search_nodes(Y, resolution);
  const auto s = detail::scan_pairs(f, xs, ys, true);
  MinimaxEstimate e;
  e.sup_inf = s.sup_inf;
  e.inf_sup = s.inf_sup;
  e.outer_max_arg = xs[s.arg_max];
  e.outer_min_arg = ys[s.arg_min];
  e.resolution = resolution;
  e.x_nodes = xs.size();
  e.y_nodes = ys.size();
  e.continuity_bound = s.lip_x * covering_radius(X, resolution) + s.lip_y * covering_radius(Y, resolution);
  return e;
}

/// sup-inf never exceeds inf-sup; on a common grid the comparison is exact.
inline bool weak_duality_check(const MinimaxEstimate& e) { return e.sup_inf <= e.inf_sup + kDualitySlack; }

struct SaddleCandidate {
  Vector x_star;
  Vector y_star;
  double value = 0.0;          // f(x*, y*)
  double max_violation = 0.0;  // max_x (f(x, y*) - value)_+
  double min_violation = 0.0;  // max_y (value - f(x*, y))_+
  double tol = 0.0;
  int resolution = 0;
  bool verified = false;
};

namespace detail {

inline void require_member(const Domain& d, ConstVec p, const char* what) {
  require_dim(p.size(), d.dimension(), what);
  if (!contains(d, p, kMembershipTol)) throw InputError(std::string(what) + ": point is not in the domain");
}

}  // namespace detail

/// Checks f(x, y*) <= f(x*, y*) <= f(x*, y) over the search nodes, with x*
/// and y* themselves added as nodes.
inline SaddleCandidate verify_saddle_on(const Objective& f, ConstVec x_star, ConstVec y_star,
                                        std::span<const Vector> xs, std::span<const Vector> ys, double tol) {
  SaddleCandidate c;
  c.x_star.assign(x_star.begin(), x_star.end());
  c.y_star.assign(y_star.begin(), y_star.end());
  c.value = evaluate(f, x_star, y_star);
  c.tol = tol;
  for (const auto& x : xs) c.max_violation = std::max(c.max_violation, evaluate(f, x, y_star) - c.value);
  for (const auto& y : ys) c.min_violation = std::max(c.min_violation, c.value - evaluate(f, x_star, y));
  c.verified = c.max_violation <= tol && c.min_violation <= tol;
  return c;
}

inline SaddleCandidate verify_saddle(const Objective& f, ConstVec x_star, ConstVec y_star, const Domain& X,
                                     const Domain& Y, int resolution, double tol = kVerifyTol) {
  detail::require_member(X, x_star, "verify_saddle x*");
  detail::require_member(Y, y_star, "verify_saddle y*");
  auto xs = search_nodes(X, resolution);
  auto ys = search_nodes(Y, resolution);
  xs.emplace_back(x_star.begin(), x_star.end());
  ys.emplace_back(y_star.begin(), y_star.end());
  auto c = verify_saddle_on(f, x_star, y_star, xs, ys, tol);
  c.resolution = resolution;
  return c;
}

/// Pairwise form of the saddle inequalities: the largest violation of
/// f(x, y*) <= f(x*, y*) <= f(x*, y) over all node pairs (x, y).
inline double saddle_pairwise_residual(const Objective& f, ConstVec x_star, ConstVec y_star, const Domain& X,
                                       const Domain& Y, int resolution) {
  detail::require_member(X, x_star, "saddle_pairwise_residual x*");
  detail::require_member(Y, y_star, "saddle_pairwise_residual y*");
  auto xs = search_nodes(X, resolution);
  auto ys = search_nodes(Y, resolution);
  xs.emplace_back(x_star.begin(), x_star.end());
  ys.emplace_back(y_star.begin(), y_star.end());
  const double value = evaluate(f, x_star, y_star);
  double worst = 0.0;
  for (const auto& x : xs) {
    const double left = evaluate(f, x, y_star);
    for (const auto& y : ys) {
      const double right = evaluate(f, x_star, y);
      worst = std::max({worst, left - value, value - right});
    }
  }
  return worst;
}

struct Mismatch {
  std::string check;
  double observed = 0.0;
  double expected = 0.0;
};

struct ForwardReport {
  double value = 0.0;
  double sup_inf = 0.0;
  double inf_sup = 0.0;
  double x_star_inner_min = 0.0;  // min_y f(x*, y)
  double y_star_inner_max = 0.0;  // max_x f(x, y*)
  double tol = 0.0;
  std::vector<Mismatch> mismatches;

  bool passed() const { return mismatches.empty(); }
};

/// A verified saddle point gives equal grid values and is an outer max/min.
inline ForwardReport proposition1_forward(const Objective& f, const SaddleCandidate& candidate, const Domain& X,
                                          const Domain& Y, int resolution, double tol = kVerifyTol) {
  if (!candidate.verified) throw InputError("proposition1_forward: candidate is not verified");
  auto xs = search_nodes(X, resolution);
  auto ys = search_nodes(Y, resolution);
  xs.push_back(candidate.x_star);
  ys.push_back(candidate.y_star);
  const auto est = grid_minimax_on(f, xs, ys, resolution);

  ForwardReport r;
  r.value = candidate.value;
  r.sup_inf = est.sup_inf;
  r.inf_sup = est.inf_sup;
  r.tol = tol;
  r.x_star_inner_min = std::numeric_limits<double>::infinity();
  for (const auto& y : ys) r.x_star_inner_min = std::min(r.x_star_inner_min, evaluate(f, candidate.x_star, y));
  r.y_star_inner_max = -std::numeric_limits<double>::infinity();
  for (const auto& x : xs) r.y_star_inner_max = std::max(r.y_star_inner_max, evaluate(f, x, candidate.y_star));

  auto expect = [&](const char* name, double observed, double expected) {
    if (std::abs(observed - expected) > tol) r.mismatches.push_back({name, observed, expected});
  };
  expect("sup_inf == value", r.sup_inf, r.value);
  expect("inf_sup == value", r.inf_sup, r.value);
  expect("x* is an outer max", r.x_star_inner_min, r.sup_inf);
  expect("y* is an outer min", r.y_star_inner_max, r.inf_sup);
  return r;
}

struct ConverseResult {
  bool accepted = false;
  double gap = 0.0;
  std::optional<SaddleCandidate> candidate;
};

/// If the grid values agree, the outer max and outer min form a saddle point.
inline ConverseResult proposition1_converse(const Objective& f, const MinimaxEstimate& estimate, const Domain& X,
                                            const Domain& Y, double tol = kVerifyTol) {
  ConverseResult r;
  r.gap = estimate.gap();
  if (std::abs(r.gap) > tol) return r;
  r.accepted = true;
  r.candidate = verify_saddle(f, estimate.outer_max_arg, estimate.outer_min_arg, X, Y, estimate.resolution, tol);
  return r;
}

}  // namespace saddle
