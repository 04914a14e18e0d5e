#pragma once

// Symmetric eigendecomposition by cyclic Jacobi rotations, and the range /
// pseudo-inverse operations built on it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "saddle/errors.hpp"
#include "saddle/linalg.hpp"

namespace saddle {

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kRankRelTol = 1e-10;
inline constexpr double kImageTol = 1e-8;

struct SpectralData {
  Vector eigenvalues;  // descending
  Matrix eigenvectors;  // column i pairs with eigenvalues[i]
  std::size_t rank = 0;
  double sigma_min_pos = std::numeric_limits<double>::quiet_NaN();  // undefined at rank 0
  double rank_tol = 0.0;

  std::size_t size() const { return eigenvalues.size(); }

  /// Orthogonal projection onto img S.
  Vector range_projection(ConstVec w) const {
    Vector out(w.size(), 0.0);
    for (std::size_t c = 0; c < rank; ++c) {
      double coeff = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) coeff += eigenvectors(i, c) * w[i];
      for (std::size_t i = 0; i < w.size(); ++i) out[i] += coeff * eigenvectors(i, c);
    }
    return out;
  }

  /// S^+ w, the minimum-norm solution of S y = w when w is in img S.
  Vector pseudo_inverse_apply(ConstVec w) const {
    Vector out(w.size(), 0.0);
    for (std::size_t c = 0; c < rank; ++c) {
      double coeff = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) coeff += eigenvectors(i, c) * w[i];
      coeff /= eigenvalues[c];
      for (std::size_t i = 0; i < w.size(); ++i) out[i] += coeff * eigenvectors(i, c);
    }
    return out;
  }

  Matrix reconstruct() const {
    const std::size_t n = size();
    Matrix m(n, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) += eigenvalues[c] * eigenvectors(i, c) * eigenvectors(j, c);
    return m;
  }
};

inline double asymmetry(const Matrix& S) {
  double m = 0.0;
  for (std::size_t i = 0; i < S.rows(); ++i)
    for (std::size_t j = i + 1; j < S.cols(); ++j) m = std::max(m, std::abs(S(i, j) - S(j, i)));
  return m;
}

inline SpectralData spectral_decompose(const Matrix& S) {
  const std::size_t n = S.rows();
  if (n == 0 || S.cols() != n) throw InputError("spectral_decompose: matrix must be square and nonempty");
  if (asymmetry(S) > kSymmetryTol * std::max(1.0, S.max_abs()))
    throw InputError("spectral_decompose: matrix is not symmetric");

  Matrix a = S;
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off == 0.0 || off <= 1e-32 * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SpectralData out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, c) = v(i, order[c]);
  }
  out.rank_tol = kRankRelTol * std::max(1.0, out.eigenvalues.front());
  for (double lambda : out.eigenvalues)
    if (lambda > out.rank_tol) {
      ++out.rank;
      out.sigma_min_pos = lambda;
    }
  return out;
}

/// Largest singular value, via the top eigenvalue of A^T A.
inline double spectral_norm(const Matrix& A) {
  if (A.is_zero()) return 0.0;
  const Matrix ata = multiply(A.transpose(), A);
  Matrix sym = ata;
  for (std::size_t i = 0; i < sym.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) sym(i, j) = sym(j, i) = 0.5 * (ata(i, j) + ata(j, i));
  return std::sqrt(std::max(0.0, spectral_decompose(sym).eigenvalues.front()));
}

/// w lies in img S up to a relative residual of tol.
inline bool in_image(const SpectralData& spec, ConstVec w, double tol = kImageTol) {
  require_dim(w.size(), spec.size(), "in_image");
  const Vector residual = subtract(w, spec.range_projection(w));
  return norm(residual) <= tol * std::max(1.0, norm(w));
}

}  // namespace saddle
