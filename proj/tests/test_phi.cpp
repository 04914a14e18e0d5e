#include <cfloat>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "saddle/minimax.hpp"
#include "saddle/phi.hpp"
#include "test_support.hpp"

namespace saddle {
namespace {

const Domain kUnit = Domain::box({-1}, {1});

Objective xy() { return Objective::bilinear(Matrix{{1.0}}); }
Objective pennies() { return Objective::bilinear(Matrix{{1, -1}, {-1, 1}}); }

PhiSolverParams tight() {
  PhiSolverParams p;
  p.tol = 1e-14;
  return p;
}

TEST(PhiPieces, GAndH) {
  const auto ctx = make_phi_context(xy(), kUnit, kUnit, 8);
  EXPECT_EQ(g_val(ctx, Vector{0}, Vector{0}, Vector{0.7}, Vector{-0.3}), 0.0);
  EXPECT_DOUBLE_EQ(g_val(ctx, Vector{1}, Vector{1}, Vector{0.7}, Vector{-0.3}), 1.0);
  EXPECT_EQ(g_val(ctx, Vector{1}, Vector{1}, Vector{0.4}, Vector{0.4}), 0.0);
  // f = xy: h(u,v;x,y) = u y - x v
  EXPECT_DOUBLE_EQ(h_val(ctx, Vector{0.5}, Vector{-1}, Vector{0.2}, Vector{0.9}), 0.2 * -1 - 0.5 * 0.9);
  EXPECT_EQ(h_val(ctx, Vector{0.3}, Vector{0.6}, Vector{0.3}, Vector{0.6}), 0.0);
}

TEST(Phi, BilinearExamples) {
  EXPECT_EQ(phi(make_phi_context(xy(), kUnit, kUnit, 64), Vector{0}, Vector{0}), 0.0);
  // Closed form: integral of (u - v)_+^2 over [-1,1]^2 is 4/3.
  EXPECT_NEAR(phi(make_phi_context(xy(), kUnit, kUnit, 64), Vector{1}, Vector{1}), 4.0 / 3.0, 1e-3);
}

TEST(Phi, RejectsNonconvexDomains) {
  EXPECT_THROW(make_phi_context(xy(), Domain::points({{-1}, {1}}), kUnit), UnsupportedDomainError);
  EXPECT_THROW(make_phi_context(xy(), kUnit, Domain::points({{0}})), UnsupportedDomainError);
}

TEST(PhiProperty, Nonnegative) {
  std::mt19937_64 rng(1);
  const auto X = Domain::box({-1, -1}, {1, 1}), Y = Domain::ball({0, 0}, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = Objective::bilinear(testing::random_matrix(rng, 2, 2), testing::random_vector(rng, 2),
                                       testing::random_vector(rng, 2));
    const auto ctx = make_phi_context(f, X, Y, 8);
    EXPECT_GE(phi(ctx, sample(X, rng), sample(Y, rng)), 0.0);
  }
}

TEST(PhiProperty, ZeroImpliesGridSaddle) {
  const auto ctx = make_phi_context(pennies(), Domain::simplex(2), Domain::simplex(2), 16);
  const Vector half{0.5, 0.5};
  ASSERT_EQ(phi(ctx, half, half), 0.0);
  std::vector<Vector> xs = ctx.x_grid.nodes, ys = ctx.y_grid.nodes;
  EXPECT_TRUE(verify_saddle_on(ctx.objective, half, half, xs, ys, 1e-12).verified);
}

TEST(PlusSquare, Derivative) {
  EXPECT_EQ(plus_square_dderiv(1, 3), 6.0);
  EXPECT_EQ(plus_square_dderiv(-1, 5), 0.0);
  EXPECT_EQ(plus_square_dderiv(0, -2), 0.0);
}

TEST(PlusSquare, LimitIdentity) {
  const auto sq = [](double a) { return a > 0 ? a * a : 0.0; };
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (double t : {1e-2, 1e-3, 1e-4}) {
        const double quotient = (sq(a + t * b) - sq(a)) / t;
        // Exact arithmetic gives equality for a > 0; the difference quotient
        // carries cancellation error of order eps * (|a| + |b|)^2 / t.
        const double rounding = 16 * DBL_EPSILON * (std::abs(a) + std::abs(b)) * (std::abs(a) + std::abs(b)) / t;
        EXPECT_LE(std::abs(quotient - plus_square_dderiv(a, b)), b * b * t + rounding) << a << " " << b << " " << t;
      }
}

TEST(SkewSymmetry, DeterministicObjectives) {
  EXPECT_EQ(skew_symmetry_check(make_phi_context(xy(), kUnit, kUnit, 4), 100, 3), 0.0);
  std::mt19937_64 rng(2);
  const auto q = Objective::quadratic({testing::random_psd(rng, 2, 1), testing::random_matrix(rng, 2, 2),
                                       ConvexTerm::sum_squares()});
  const auto X = Domain::box({-1, -1}, {1, 1}), Y = Domain::ball({0, 0}, 1.0);
  EXPECT_LE(skew_symmetry_check(make_phi_context(q, X, Y, 4), 100, 3), 1e-12);
  EXPECT_THROW(skew_symmetry_check(make_phi_context(xy(), kUnit, kUnit, 4), 0, 3), InputError);
}

TEST(SkewSymmetry, NoisyBlackBoxIsFlagged) {
  auto noise = std::make_shared<std::mt19937_64>(99);
  const auto f = Objective::black_box({1, 1,
                                       [noise](ConstVec x, ConstVec y) {
                                         std::uniform_real_distribution<double> u(-1e-3, 1e-3);
                                         return x[0] * y[0] + u(*noise);
                                       },
                                       {}, {}, false});
  EXPECT_GT(skew_symmetry_check(make_phi_context(f, kUnit, kUnit, 4), 100, 3), 0.0);
}

TEST(PhiGradient, ZeroAtSaddle) {
  const auto g = phi_gradient(make_phi_context(xy(), kUnit, kUnit, 16), Vector{0}, Vector{0});
  EXPECT_EQ(g.grad_x, Vector{0.0});
  EXPECT_EQ(g.grad_y, Vector{0.0});
}

// Oracle: central differences of phi itself.
GradientPair phi_fd(const PhiContext& ctx, const Vector& x, const Vector& y, double h) {
  GradientPair g{Vector(x.size()), Vector(y.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g.grad_x[i] = (phi(ctx, p, y) - phi(ctx, m, y)) / (2 * h);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    Vector p = y, m = y;
    p[j] += h;
    m[j] -= h;
    g.grad_y[j] = (phi(ctx, x, p) - phi(ctx, x, m)) / (2 * h);
  }
  return g;
}

void expect_gradient_matches(const PhiContext& ctx, const Vector& x, const Vector& y) {
  const auto a = phi_gradient(ctx, x, y);
  const auto o = phi_fd(ctx, x, y, 1e-5);
  const double scale = std::hypot(norm(o.grad_x), norm(o.grad_y));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(a.grad_x[i], o.grad_x[i], 1e-4 * scale);
  for (std::size_t j = 0; j < y.size(); ++j) EXPECT_NEAR(a.grad_y[j], o.grad_y[j], 1e-4 * scale);
}

TEST(PhiGradient, XyAtCornerMatchesFiniteDifferences) {
  const auto ctx = make_phi_context(xy(), kUnit, kUnit, 64);
  // Interior point next to (1, 1) so the stencil stays in the box.
  expect_gradient_matches(ctx, Vector{0.99}, Vector{0.99});
  const auto g = phi_gradient(ctx, Vector{1}, Vector{1});
  EXPECT_GT(g.grad_x[0], 0.0);
  EXPECT_GT(g.grad_y[0], 0.0);
  // A small step against the gradient lowers Phi.
  const double before = phi(ctx, Vector{1}, Vector{1});
  const double after = phi(ctx, Vector{1 - 1e-3 * g.grad_x[0]}, Vector{1 - 1e-3 * g.grad_y[0]});
  EXPECT_LT(after, before);
}

TEST(PhiGradientProperty, MatchesFiniteDifferencesAtSeededPoints) {
  std::mt19937_64 rng(21);
  const auto X = Domain::box({-1, -1}, {1, 1}), Y = Domain::box({-1, -1}, {1, 1});
  const auto f = Objective::quadratic({testing::random_psd(rng, 2, 0), testing::random_matrix(rng, 2, 2),
                                       ConvexTerm::sum_squares(0.5)});
  const auto ctx = make_phi_context(f, X, Y, 12);
  int checked = 0;
  while (checked < 20) {
    const Vector x = testing::random_vector(rng, 2, -0.9, 0.9), y = testing::random_vector(rng, 2, -0.9, 0.9);
    if (phi(ctx, x, y) <= 0.0) continue;
    expect_gradient_matches(ctx, x, y);
    ++checked;
  }
}

void expect_variation_inequality(const PhiContext& ctx, const PhiSolveResult& r) {
  ASSERT_TRUE(r.converged);
  const auto& X = ctx.X;
  const auto& Y = ctx.Y;
  // 5 x 5 probe grid: five points of X paired with five points of Y.
  std::vector<Vector> px, py;
  for (int i = 0; i < 5; ++i) {
    const double t = i / 4.0;
    px.push_back(X.kind() == DomainKind::Simplex ? Vector{t, 1 - t} : Vector{-1 + 2 * t});
    py.push_back(Y.kind() == DomainKind::Simplex ? Vector{1 - t, t} : Vector{-1 + 2 * t});
  }
  for (const auto& x : px)
    for (const auto& y : py) {
      const auto v = variation_inequality_check(ctx, r.x_star, r.y_star, x, y, 1e-6);
      EXPECT_TRUE(v.holds) << "lhs " << v.lhs << " rhs " << v.rhs;
    }
}

TEST(MinimizePhi, BilinearFromCorner) {
  const auto ctx = make_phi_context(xy(), kUnit, kUnit, 64);
  const auto r = minimize_phi(ctx, Vector{1}, Vector{1}, tight());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.phi_value, 1e-8);
  EXPECT_LE(std::abs(r.x_star[0]), 1e-3);
  EXPECT_LE(std::abs(r.y_star[0]), 1e-3);
  EXPECT_EQ(r.stop_reason, StopReason::Converged);
  EXPECT_EQ(r.failure, FailureKind::None);
  expect_variation_inequality(ctx, r);
}

TEST(MinimizePhi, MatchingPennies) {
  const auto S = Domain::simplex(2);
  const auto ctx = make_phi_context(pennies(), S, S);
  const auto r = minimize_phi(ctx, Vector{1, 0}, Vector{0.2, 0.8}, tight());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.phi_value, 1e-8);
  EXPECT_TRUE(verify_saddle(pennies(), r.x_star, r.y_star, S, S, 201, 1e-3).verified);
  expect_variation_inequality(ctx, r);
}

TEST(MinimizePhi, DefaultToleranceOnMatchingPennies) {
  const auto S = Domain::simplex(2);
  const auto r = minimize_phi(make_phi_context(pennies(), S, S), Vector{1, 0}, Vector{0.2, 0.8});
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.phi_value, 1e-8);
  EXPECT_TRUE(verify_saddle(pennies(), r.x_star, r.y_star, S, S, 201, 1e-3).verified);
}

TEST(MinimizePhi, StartAtSaddleStopsImmediately) {
  const auto r = minimize_phi(make_phi_context(xy(), kUnit, kUnit, 16), Vector{0}, Vector{0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.phi_value, 0.0);
  ASSERT_EQ(r.trajectory.size(), 1u);
}

TEST(MinimizePhi, TrajectoryIsNonIncreasing) {
  std::mt19937_64 rng(6);
  const auto X = Domain::box({-1, -1}, {1, 1}), Y = Domain::ball({0, 0}, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = Objective::bilinear(testing::random_matrix(rng, 2, 2));
    const auto ctx = make_phi_context(f, X, Y, 10);
    const auto r = minimize_phi(ctx, sample(X, rng), sample(Y, rng));
    for (std::size_t i = 1; i < r.trajectory.size(); ++i)
      EXPECT_LE(r.trajectory[i].phi, r.trajectory[i - 1].phi);
    for (const auto& p : r.trajectory) EXPECT_GE(p.phi, 0.0);
    if (r.converged) {
      EXPECT_LE(r.phi_value, PhiSolverParams{}.tol);
    }
  }
}

TEST(MinimizePhi, NonConvergenceIsClassified) {
  // One iteration is not enough from the corner: a numerical failure.
  PhiSolverParams p;
  p.max_iters = 1;
  const auto ctx = make_phi_context(xy(), kUnit, kUnit, 16);
  const auto r = minimize_phi(ctx, Vector{1}, Vector{1}, p);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.stop_reason, StopReason::MaxIterations);
  EXPECT_EQ(r.failure, FailureKind::Numerical);
  EXPECT_FALSE(r.diagnosis);

  // A convex-convex payoff has no saddle certificate; the diagnosis says why.
  const auto bowl = Objective::black_box(
      {1, 1, [](ConstVec x, ConstVec y) { return x[0] * x[0] + y[0] * y[0]; }, {}, {}, true});
  p.max_iters = 200;
  p.diagnose_samples = 200;
  p.seed = 4;
  const auto b = minimize_phi(make_phi_context(bowl, kUnit, kUnit, 16), Vector{0.5}, Vector{0.5}, p);
  if (!b.converged) {
    ASSERT_TRUE(b.diagnosis);
    EXPECT_EQ(b.failure, FailureKind::HypothesisViolated);
  }
}

}  // namespace
}  // namespace saddle
