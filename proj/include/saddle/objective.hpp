#pragma once

// Payoff functions f(x, y), x maximizing and y minimizing.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>

#include "saddle/domain.hpp"
#include "saddle/errors.hpp"
#include "saddle/linalg.hpp"

namespace saddle {

inline constexpr double kFiniteDifferenceStep = 1e-5;

using ScalarFn = std::function<double(ConstVec)>;
using GradientFn = std::function<void(ConstVec, std::span<double>)>;

namespace detail {

// Central differences of a scalar function of one vector argument.
inline void central_difference(const ScalarFn& fn, ConstVec at, double h, std::span<double> out) {
  Vector p(at.begin(), at.end());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double fp = fn(p);
    p[i] = orig - h;
    const double fm = fn(p);
    p[i] = orig;
    out[i] = (fp - fm) / (2.0 * h);
  }
}

}  // namespace detail

/// The convex penalty g(x) of a quadratic game.
class ConvexTerm {
 public:
  enum class Kind { Zero, SumSquares, Linear, Custom };

  static ConvexTerm zero() { return ConvexTerm(Kind::Zero); }

  /// scale * ||x||^2
  static ConvexTerm sum_squares(double scale = 1.0) {
    if (!(scale >= 0.0)) throw InputError("sum_squares: scale must be nonnegative");
    ConvexTerm t(Kind::SumSquares);
    t.scale_ = scale;
    return t;
  }

  /// coef . x
  static ConvexTerm linear(Vector coef) {
    ConvexTerm t(Kind::Linear);
    t.coef_ = std::move(coef);
    return t;
  }

  /// User handle; without a gradient, central differences are used.
  static ConvexTerm custom(ScalarFn value, GradientFn gradient = {}) {
    if (!value) throw InputError("custom convex term needs a value handle");
    ConvexTerm t(Kind::Custom);
    t.value_ = std::move(value);
    t.gradient_ = std::move(gradient);
    return t;
  }

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  const Vector& coef() const { return coef_; }

  double value(ConstVec x) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::SumSquares: return scale_ * dot(x, x);
      case Kind::Linear:
        require_dim(x.size(), coef_.size(), "linear convex term");
        return dot(coef_, x);
      case Kind::Custom: return value_(x);
    }
    return 0.0;
  }

  void gradient(ConstVec x, std::span<double> out, double h = kFiniteDifferenceStep) const {
    switch (kind_) {
      case Kind::Zero: std::fill(out.begin(), out.end(), 0.0); return;
      case Kind::SumSquares:
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * scale_ * x[i];
        return;
      case Kind::Linear: std::copy(coef_.begin(), coef_.end(), out.begin()); return;
      case Kind::Custom:
        if (gradient_) gradient_(x, out);
        else detail::central_difference(value_, x, h, out);
        return;
    }
  }

  Vector gradient(ConstVec x) const {
    Vector g(x.size());
    gradient(x, g);
    return g;
  }

 private:
  explicit ConvexTerm(Kind k) : kind_(k) {}

  Kind kind_;
  double scale_ = 1.0;
  Vector coef_;
  ScalarFn value_;
  GradientFn gradient_;
};

/// f(x, y) = x^T M y + a^T x + b^T y + c
struct Bilinear {
  Matrix M;
  Vector a;
  Vector b;
  double c = 0.0;
};

/// f(x, y) = 1/2 y^T S y - y^T A x - g(x), with S k-by-k and A k-by-d.
struct QuadraticPayoff {
  Matrix S;
  Matrix A;
  ConvexTerm g = ConvexTerm::zero();
};

/// Opaque payoff. Handles must be deterministic and safe to call concurrently.
struct BlackBox {
  std::size_t dim_x = 0;
  std::size_t dim_y = 0;
  std::function<double(ConstVec, ConstVec)> value;
  std::function<void(ConstVec, ConstVec, std::span<double>)> grad_x;
  std::function<void(ConstVec, ConstVec, std::span<double>)> grad_y;
  bool smooth = true;
};

class Objective {
 public:
  using Variant = std::variant<Bilinear, QuadraticPayoff, BlackBox>;

  static Objective bilinear(Matrix M, Vector a = {}, Vector b = {}, double c = 0.0) {
    if (M.rows() == 0 || M.cols() == 0) throw InputError("bilinear: M must be nonempty");
    if (a.empty()) a.assign(M.rows(), 0.0);
    if (b.empty()) b.assign(M.cols(), 0.0);
    require_dim(a.size(), M.rows(), "bilinear a");
    require_dim(b.size(), M.cols(), "bilinear b");
    const std::size_t d = M.rows(), k = M.cols();
    return Objective(Bilinear{std::move(M), std::move(a), std::move(b), c}, d, k);
  }

  static Objective quadratic(QuadraticPayoff q) {
    const std::size_t k = q.S.rows();
    if (k == 0 || q.S.cols() != k) throw InputError("quadratic: S must be square and nonempty");
    require_dim(q.A.rows(), k, "quadratic A rows");
    const std::size_t d = q.A.cols();
    if (d == 0) throw InputError("quadratic: A must have at least one column");
    if (q.g.kind() == ConvexTerm::Kind::Linear) require_dim(q.g.coef().size(), d, "linear g");
    return Objective(std::move(q), d, k);
  }

  static Objective black_box(BlackBox bb) {
    if (bb.dim_x == 0 || bb.dim_y == 0) throw InputError("black box: dimensions must be positive");
    if (!bb.value) throw InputError("black box: missing evaluation handle");
    const std::size_t d = bb.dim_x, k = bb.dim_y;
    return Objective(std::move(bb), d, k);
  }

  std::size_t dim_x() const { return dim_x_; }
  std::size_t dim_y() const { return dim_y_; }
  const Variant& variant() const { return v_; }

  const QuadraticPayoff* as_quadratic() const { return std::get_if<QuadraticPayoff>(&v_); }
  const Bilinear* as_bilinear() const { return std::get_if<Bilinear>(&v_); }

 private:
  Objective(Variant v, std::size_t d, std::size_t k) : v_(std::move(v)), dim_x_(d), dim_y_(k) {}

  Variant v_;
  std::size_t dim_x_;
  std::size_t dim_y_;
};

struct GradientPair {
  Vector grad_x;
  Vector grad_y;
};

namespace detail {

inline double evaluate_unchecked(const Objective& f, ConstVec x, ConstVec y) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bilinear>) {
          double s = v.c + dot(v.a, x) + dot(v.b, y);
          for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * dot(v.M.row(i), y);
          return s;
        } else if constexpr (std::is_same_v<T, QuadraticPayoff>) {
          double quad = 0.0, cross = 0.0;
          for (std::size_t i = 0; i < y.size(); ++i) {
            quad += y[i] * dot(v.S.row(i), y);
            cross += y[i] * dot(v.A.row(i), x);
          }
          return 0.5 * quad - cross - v.g.value(x);
        } else {
          return v.value(x, y);
        }
      },
      f.variant());
}

}  // namespace detail

inline double evaluate(const Objective& f, ConstVec x, ConstVec y) {
  require_dim(x.size(), f.dim_x(), "evaluate x");
  require_dim(y.size(), f.dim_y(), "evaluate y");
  const double v = detail::evaluate_unchecked(f, x, y);
  if (!std::isfinite(v))
    throw EvaluationError("objective is not finite", Vector(x.begin(), x.end()), Vector(y.begin(), y.end()));
  return v;
}

/// Writes both partial gradients into caller-provided storage.
inline void gradients_into(const Objective& f, ConstVec x, ConstVec y, std::span<double> gx,
                           std::span<double> gy, double h = kFiniteDifferenceStep) {
  require_dim(x.size(), f.dim_x(), "gradients x");
  require_dim(y.size(), f.dim_y(), "gradients y");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Bilinear>) {
          for (std::size_t i = 0; i < x.size(); ++i) gx[i] = dot(v.M.row(i), y) + v.a[i];
          for (std::size_t j = 0; j < y.size(); ++j) gy[j] = v.b[j];
          for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) gy[j] += v.M(i, j) * x[i];
        } else if constexpr (std::is_same_v<T, QuadraticPayoff>) {
          // grad_y = S y - A x ; grad_x = -A^T y - grad g(x)
          for (std::size_t j = 0; j < y.size(); ++j) gy[j] = dot(v.S.row(j), y) - dot(v.A.row(j), x);
          v.g.gradient(x, gx, h);
          for (std::size_t i = 0; i < x.size(); ++i) {
            double aty = 0.0;
            for (std::size_t j = 0; j < y.size(); ++j) aty += v.A(j, i) * y[j];
            gx[i] = -aty - gx[i];
          }
        } else {
          if (v.grad_x) {
            v.grad_x(x, y, gx);
          } else {
            Vector yy(y.begin(), y.end());
            detail::central_difference([&](ConstVec p) { return v.value(p, yy); }, x, h, gx);
          }
          if (v.grad_y) {
            v.grad_y(x, y, gy);
          } else {
            Vector xx(x.begin(), x.end());
            detail::central_difference([&](ConstVec p) { return v.value(xx, p); }, y, h, gy);
          }
        }
      },
      f.variant());
  if (!all_finite(gx) || !all_finite(gy))
    throw EvaluationError("gradient is not finite", Vector(x.begin(), x.end()), Vector(y.begin(), y.end()));
}

inline GradientPair gradients(const Objective& f, ConstVec x, ConstVec y, double h = kFiniteDifferenceStep) {
  GradientPair g{Vector(f.dim_x()), Vector(f.dim_y())};
  gradients_into(f, x, y, g.grad_x, g.grad_y, h);
  return g;
}

/// Outcome of the sampled midpoint test. A clean report means "no violation
/// found", never a proof of convexity.
struct ConvexityReport {
  int samples = 0;
  double tol = 0.0;
  // max of (f(x1,y)+f(x2,y))/2 - f((x1+x2)/2, y), clipped at 0
  double concavity_violation_x = 0.0;
  Vector witness_x1, witness_x2, witness_y;
  // max of f(x,(y1+y2)/2) - (f(x,y1)+f(x,y2))/2, clipped at 0
  double convexity_violation_y = 0.0;
  Vector witness_y1, witness_y2, witness_x;

  bool no_violation_found() const {
    return concavity_violation_x <= tol && convexity_violation_y <= tol;
  }
};

inline ConvexityReport check_convex_concave(const Objective& f, const Domain& X, const Domain& Y,
                                            int samples, std::uint64_t seed, double tol = 1e-12) {
  if (!X.convex() || !Y.convex())
    throw UnsupportedDomainError("check_convex_concave: domains must be convex");
  require_dim(X.dimension(), f.dim_x(), "check_convex_concave X");
  require_dim(Y.dimension(), f.dim_y(), "check_convex_concave Y");
  std::mt19937_64 rng(seed);
  ConvexityReport r;
  r.samples = samples;
  r.tol = tol;
  for (int s = 0; s < samples; ++s) {
    {
      const Vector x1 = sample(X, rng), x2 = sample(X, rng), y = sample(Y, rng);
      const Vector mid = scaled(add(x1, x2), 0.5);
      const double gap = 0.5 * (evaluate(f, x1, y) + evaluate(f, x2, y)) - evaluate(f, mid, y);
      if (gap > r.concavity_violation_x) {
        r.concavity_violation_x = gap;
        r.witness_x1 = x1;
        r.witness_x2 = x2;
        r.witness_y = y;
      }
    }
    {
      const Vector y1 = sample(Y, rng), y2 = sample(Y, rng), x = sample(X, rng);
      const Vector mid = scaled(add(y1, y2), 0.5);
      const double gap = evaluate(f, x, mid) - 0.5 * (evaluate(f, x, y1) + evaluate(f, x, y2));
      if (gap > r.convexity_violation_y) {
        r.convexity_violation_y = gap;
        r.witness_y1 = y1;
        r.witness_y2 = y2;
        r.witness_x = x;
      }
    }
  }
  return r;
}

}  // namespace saddle
