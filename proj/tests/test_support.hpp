#pragma once

// Shared generators for property-style tests.

#include <cstdint>
#include <random>

#include "saddle/linalg.hpp"
#include "saddle/spectral.hpp"

namespace saddle::testing {

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

/// Random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::mt19937_64& rng, std::size_t n) {
  Matrix g = random_matrix(rng, n, n);
  Matrix q(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g(i, c);
    for (std::size_t p = 0; p < c; ++p) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += q(i, p) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q(i, p);
    }
    const double nv = norm(v);
    for (std::size_t i = 0; i < n; ++i) q(i, c) = v[i] / nv;
  }
  return q;
}

/// Q diag(lambda) Q^T, symmetrized exactly.
inline Matrix from_spectrum(const Matrix& q, const Vector& lambda) {
  const std::size_t n = lambda.size();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.0;
      for (std::size_t c = 0; c < n; ++c) v += q(i, c) * lambda[c] * q(j, c);
      s(i, j) = s(j, i) = v;
    }
  return s;
}

/// PSD matrix of size n with `zeros` zero eigenvalues and the rest in [lo, hi].
inline Matrix random_psd(std::mt19937_64& rng, std::size_t n, std::size_t zeros, double lo = 0.5,
                         double hi = 2.0, Vector* spectrum = nullptr) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector lambda(n, 0.0);
  for (std::size_t i = zeros; i < n; ++i) lambda[i] = u(rng);
  if (spectrum) *spectrum = lambda;
  return from_spectrum(random_orthogonal(rng, n), lambda);
}

}  // namespace saddle::testing
