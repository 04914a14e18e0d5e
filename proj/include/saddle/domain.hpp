#pragma once

// Compact strategy sets: boxes, Euclidean balls, the probability simplex and
// finite point sets. Every value is immutable after construction.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/linalg.hpp"

namespace saddle {

inline constexpr double kMembershipTol = 1e-9;

enum class DomainKind { Box, Ball, Simplex, FinitePointSet };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Box: return "box";
    case DomainKind::Ball: return "ball";
    case DomainKind::Simplex: return "simplex";
    case DomainKind::FinitePointSet: return "points";
  }
  return "?";
}

class Domain {
 public:
  static Domain box(Vector lower, Vector upper) {
    if (lower.empty()) throw InputError("box: dimension must be positive");
    require_dim(upper.size(), lower.size(), "box bounds");
    for (std::size_t i = 0; i < lower.size(); ++i)
      if (!(lower[i] < upper[i]))
        throw InputError("box: lower[" + std::to_string(i) + "] must be < upper");
    Domain d(DomainKind::Box, lower.size());
    d.lower_ = std::move(lower);
    d.upper_ = std::move(upper);
    return d;
  }

  static Domain ball(Vector center, double radius) {
    if (center.empty()) throw InputError("ball: dimension must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw InputError("ball: radius must be positive and finite");
    Domain d(DomainKind::Ball, center.size());
    d.center_ = std::move(center);
    d.radius_ = radius;
    return d;
  }

  /// Standard probability simplex {p >= 0, sum p = 1} in R^dim.
  static Domain simplex(std::size_t dim) {
    if (dim == 0) throw InputError("simplex: dimension must be positive");
    return Domain(DomainKind::Simplex, dim);
  }

  static Domain points(std::vector<Vector> pts) {
    if (pts.empty()) throw InputError("points: set must be nonempty");
    const std::size_t dim = pts.front().size();
    if (dim == 0) throw InputError("points: dimension must be positive");
    for (const auto& p : pts) require_dim(p.size(), dim, "points");
    Domain d(DomainKind::FinitePointSet, dim);
    d.points_ = std::move(pts);
    return d;
  }

  DomainKind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  bool convex() const { return kind_ != DomainKind::FinitePointSet; }

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Vector>& point_set() const { return points_; }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(DomainKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  DomainKind kind_;
  std::size_t dim_;
  Vector lower_, upper_, center_;
  double radius_ = 0.0;
  std::vector<Vector> points_;
};

struct QuadratureGrid {
  std::vector<Vector> nodes;
  std::vector<double> weights;
  int resolution = 0;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
  }
};

namespace detail {

// Rounding allowance for the simplex equality constraint.
inline double simplex_slack(std::size_t n) { return 4.0 * static_cast<double>(n) * DBL_EPSILON; }

inline Vector project_simplex_raw(ConstVec p) {
  Vector u(p.begin(), p.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Vector x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) x[i] = std::max(p[i] - theta, 0.0);
  return x;
}

// Visits every multi-index of an n-per-axis tensor grid in row-major order
// (last axis fastest).
template <typename Fn>
void for_each_multi_index(std::size_t dims, int n, Fn&& fn) {
  std::vector<int> idx(dims, 0);
  if (dims == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    std::size_t axis = dims;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < n) break;
      idx[axis] = 0;
      if (axis == 0) return;
    }
  }
}

// Midpoint of cell i of n on [lo, hi]; written so that the centre cell of an
// odd grid lands exactly on the interval midpoint.
inline double midpoint(double lo, double hi, int i, int n) {
  return lo + (hi - lo) * static_cast<double>(2 * i + 1) / static_cast<double>(2 * n);
}

}  // namespace detail

/// Membership up to `tol` in each defining inequality.
inline bool contains(const Domain& d, ConstVec p, double tol = kMembershipTol) {
  require_dim(p.size(), d.dimension(), "contains");
  if (tol < 0.0) throw InputError("contains: tol must be nonnegative");
  switch (d.kind()) {
    case DomainKind::Box:
      for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] >= d.lower()[i] - tol && p[i] <= d.upper()[i] + tol)) return false;
      return true;
    case DomainKind::Ball:
      return distance(p, d.center()) <= d.radius() + tol;
    case DomainKind::Simplex: {
      double s = 0.0;
      for (double v : p) {
        if (!(v >= -tol)) return false;
        s += v;
      }
      return std::abs(s - 1.0) <= tol + detail::simplex_slack(p.size());
    }
    case DomainKind::FinitePointSet:
      for (const auto& q : d.point_set()) {
        bool close = true;
        for (std::size_t i = 0; i < p.size() && close; ++i) close = std::abs(p[i] - q[i]) <= tol;
        if (close) return true;
      }
      return false;
  }
  return false;
}

/// Euclidean projection onto a convex domain. Members come back unchanged.
inline Vector project(const Domain& d, ConstVec p) {
  require_dim(p.size(), d.dimension(), "project");
  if (!d.convex())
    throw UnsupportedDomainError("project: finite point sets are not convex");
  if (contains(d, p, 0.0)) return Vector(p.begin(), p.end());
  switch (d.kind()) {
    case DomainKind::Box: {
      Vector q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = std::clamp(p[i], d.lower()[i], d.upper()[i]);
      return q;
    }
    case DomainKind::Ball: {
      const Vector offset = subtract(p, d.center());
      double scale = d.radius() / norm(offset);
      Vector q = axpy(d.center(), scale, offset);
      for (int guard = 0; guard < 16 && !contains(d, q, 0.0); ++guard) {
        scale *= 1.0 - 2.0 * DBL_EPSILON;
        q = axpy(d.center(), scale, offset);
      }
      return q;
    }
    case DomainKind::Simplex: {
      Vector q = detail::project_simplex_raw(p);
      for (int guard = 0; guard < 4 && !contains(d, q, 0.0); ++guard) q = detail::project_simplex_raw(q);
      return q;
    }
    case DomainKind::FinitePointSet: break;
  }
  throw UnsupportedDomainError("project: unsupported domain");
}

namespace detail {

/// Sub-samples per axis used to measure a cell cut by the domain boundary.
inline int boundary_subdivisions(std::size_t dims) {
  int m = 2;
  while (std::pow(static_cast<double>(m + 1), static_cast<double>(dims)) <= 64.0) ++m;
  return m;
}

/// Appends one midpoint cell. A cell crossing the boundary gets the measured
/// inside fraction of its volume, and its node moves to the centroid of the
/// inside sub-samples when the midpoint itself falls outside. `margin` is
/// nonnegative exactly on the domain; sub-samples on the boundary count half.
template <typename Margin>
void add_cell(QuadratureGrid& g, Vector mid, const Vector& widths, bool fully_inside, const Margin& margin) {
  const auto inside = [&](const Vector& p) { return margin(p) >= 0.0; };
  double volume = 1.0;
  for (double w : widths) volume *= w;
  if (fully_inside) {
    g.nodes.push_back(std::move(mid));
    g.weights.push_back(volume);
    return;
  }
  const std::size_t dims = mid.size();
  const int m = boundary_subdivisions(dims);
  Vector centroid(dims, 0.0), p(dims);
  double hits = 0.0;
  int total = 0;
  for_each_multi_index(dims, m, [&](const std::vector<int>& sub) {
    for (std::size_t i = 0; i < dims; ++i)
      p[i] = midpoint(mid[i] - 0.5 * widths[i], mid[i] + 0.5 * widths[i], sub[i], m);
    ++total;
    const double s = margin(p);
    if (s < 0.0) return;
    hits += s > 0.0 ? 1.0 : 0.5;
    for (std::size_t i = 0; i < dims; ++i) centroid[i] += p[i];
  });
  if (hits == 0.0) return;
  if (!inside(mid)) {
    for (auto& c : centroid) c /= hits;
    if (!inside(centroid)) return;
    mid = std::move(centroid);
  }
  g.nodes.push_back(std::move(mid));
  g.weights.push_back(volume * hits / total);
}

}  // namespace detail

/// Tensor-product midpoint rule. Balls and simplices are masked against the
/// bounding box, with cut cells weighted by their inside fraction. The simplex
/// grid lives in the chart of its first dim-1 coordinates.
inline QuadratureGrid quadrature(const Domain& d, int resolution) {
  if (resolution < 1) throw InputError("quadrature: resolution must be >= 1");
  QuadratureGrid g;
  g.resolution = resolution;
  const std::size_t dim = d.dimension();
  switch (d.kind()) {
    case DomainKind::Box: {
      double w = 1.0;
      for (std::size_t i = 0; i < dim; ++i) w *= (d.upper()[i] - d.lower()[i]) / resolution;
      detail::for_each_multi_index(dim, resolution, [&](const std::vector<int>& idx) {
        Vector node(dim);
        for (std::size_t i = 0; i < dim; ++i)
          node[i] = detail::midpoint(d.lower()[i], d.upper()[i], idx[i], resolution);
        g.nodes.push_back(std::move(node));
        g.weights.push_back(w);
      });
      break;
    }
    case DomainKind::Ball: {
      const double h = 2.0 * d.radius() / resolution;
      const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(dim));
      const auto inside = [&](const Vector& p) { return contains(d, p, 0.0) ? 1.0 : -1.0; };
      detail::for_each_multi_index(dim, resolution, [&](const std::vector<int>& idx) {
        Vector node(dim);
        for (std::size_t i = 0; i < dim; ++i)
          node[i] = detail::midpoint(d.center()[i] - d.radius(), d.center()[i] + d.radius(),
                                     idx[i], resolution);
        const double rho = distance(node, d.center());
        if (rho - half_diag > d.radius()) return;
        detail::add_cell(g, std::move(node), Vector(dim, h), rho + half_diag <= d.radius(), inside);
      });
      break;
    }
    case DomainKind::Simplex: {
      // Quadrature lives on the chart (first dim-1 coordinates) of the affine hull.
      const std::size_t chart = dim - 1;
      if (chart == 0) {
        g.nodes.push_back(Vector{1.0});
        g.weights.push_back(1.0);
        break;
      }
      const double h = 1.0 / resolution;
      const double half_span = 0.5 * h * static_cast<double>(chart);
      const auto inside = [&](const Vector& c) {
        double s = 0.0;
        for (double v : c) s += v;
        return 1.0 - s;
      };
      QuadratureGrid chart_grid;
      detail::for_each_multi_index(chart, resolution, [&](const std::vector<int>& idx) {
        Vector c(chart);
        double s = 0.0;
        for (std::size_t i = 0; i < chart; ++i) {
          c[i] = detail::midpoint(0.0, 1.0, idx[i], resolution);
          s += c[i];
        }
        if (s - half_span >= 1.0) return;
        detail::add_cell(chart_grid, std::move(c), Vector(chart, h), s + half_span <= 1.0, inside);
      });
      for (std::size_t n = 0; n < chart_grid.size(); ++n) {
        Vector node(dim);
        double s = 0.0;
        for (std::size_t i = 0; i < chart; ++i) {
          node[i] = chart_grid.nodes[n][i];
          s += node[i];
        }
        node[chart] = std::max(0.0, 1.0 - s);
        g.nodes.push_back(std::move(node));
        g.weights.push_back(chart_grid.weights[n]);
      }
      break;
    }
    case DomainKind::FinitePointSet:
      g.nodes = d.point_set();
      g.weights.assign(g.nodes.size(), 1.0);
      break;
  }
  return g;
}

/// C = max over the domain of the Euclidean norm.
inline double bounding_norm(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::Box: {
      double s = 0.0;
      for (std::size_t i = 0; i < d.dimension(); ++i) {
        const double m = std::max(std::abs(d.lower()[i]), std::abs(d.upper()[i]));
        s += m * m;
      }
      return std::sqrt(s);
    }
    case DomainKind::Ball: return norm(d.center()) + d.radius();
    case DomainKind::Simplex: return 1.0;
    case DomainKind::FinitePointSet: {
      double m = 0.0;
      for (const auto& p : d.point_set()) m = std::max(m, norm(p));
      return m;
    }
  }
  return 0.0;
}

/// Boundary points worth adding to a search grid: box vertices (bit i of the
/// index selects upper[i]), the 2d axis poles of a ball, simplex vertices.
inline std::vector<Vector> extreme_points(const Domain& d) {
  std::vector<Vector> out;
  const std::size_t dim = d.dimension();
  switch (d.kind()) {
    case DomainKind::Box: {
      if (dim > 20) break;
      const std::size_t count = std::size_t{1} << dim;
      for (std::size_t mask = 0; mask < count; ++mask) {
        Vector v(dim);
        for (std::size_t i = 0; i < dim; ++i) v[i] = (mask >> i) & 1U ? d.upper()[i] : d.lower()[i];
        out.push_back(std::move(v));
      }
      break;
    }
    case DomainKind::Ball:
      for (std::size_t i = 0; i < dim; ++i)
        for (double sgn : {-1.0, 1.0}) {
          Vector v = d.center();
          v[i] += sgn * d.radius();
          out.push_back(std::move(v));
        }
      break;
    case DomainKind::Simplex:
      for (std::size_t i = 0; i < dim; ++i) {
        Vector v(dim, 0.0);
        v[i] = 1.0;
        out.push_back(std::move(v));
      }
      break;
    case DomainKind::FinitePointSet: break;
  }
  return out;
}

/// Upper estimate of the distance from any member to the nearest node of
/// quadrature(d, resolution). Masked grids get a full cell diagonal.
inline double covering_radius(const Domain& d, int resolution) {
  const double n = static_cast<double>(d.dimension());
  switch (d.kind()) {
    case DomainKind::Box: {
      double s = 0.0;
      for (std::size_t i = 0; i < d.dimension(); ++i) {
        const double h = (d.upper()[i] - d.lower()[i]) / resolution;
        s += h * h;
      }
      return 0.5 * std::sqrt(s);
    }
    case DomainKind::Ball: return std::sqrt(n) * 2.0 * d.radius() / resolution;
    case DomainKind::Simplex: return std::sqrt(n) * std::sqrt(n - 1.0) / resolution;
    case DomainKind::FinitePointSet: return 0.0;
  }
  return 0.0;
}

/// A representative member: box midpoint, ball centre, simplex barycentre.
inline Vector interior_point(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::Box: return scaled(add(d.lower(), d.upper()), 0.5);
    case DomainKind::Ball: return d.center();
    case DomainKind::Simplex:
      return Vector(d.dimension(), 1.0 / static_cast<double>(d.dimension()));
    case DomainKind::FinitePointSet: return d.point_set().front();
  }
  return {};
}

/// Random member. Uniform for boxes and balls, flat Dirichlet on the simplex.
template <typename Rng>
Vector sample(const Domain& d, Rng& rng) {
  const std::size_t dim = d.dimension();
  Vector p(dim);
  switch (d.kind()) {
    case DomainKind::Box: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (std::size_t i = 0; i < dim; ++i)
        p[i] = d.lower()[i] + (d.upper()[i] - d.lower()[i]) * u(rng);
      return p;
    }
    case DomainKind::Ball: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double n2 = 0.0;
      do {
        n2 = 0.0;
        for (auto& v : p) {
          v = gauss(rng);
          n2 += v * v;
        }
      } while (n2 == 0.0);
      const double r = d.radius() * std::pow(u(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(n2);
      return project(d, axpy(d.center(), r, p));
    }
    case DomainKind::Simplex: {
      std::exponential_distribution<double> e(1.0);
      double s = 0.0;
      for (auto& v : p) {
        v = e(rng);
        s += v;
      }
      for (auto& v : p) v /= s;
      return project(d, p);
    }
    case DomainKind::FinitePointSet: {
      std::uniform_int_distribution<std::size_t> pick(0, d.point_set().size() - 1);
      return d.point_set()[pick(rng)];
    }
  }
  return p;
}

}  // namespace saddle
