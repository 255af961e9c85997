#pragma once

// Independent reference computations for the tests. Everything here uses
// explicit inverses, eigen-decompositions or brute-force loops, never the
// library's factorization routes.

#include "ewtls/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using ewtls::Index;
using ewtls::IndexSet;
using ewtls::Matrix;
using ewtls::Vector;

inline Matrix randn(Index r, Index c, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index k = 0; k < c; ++k) m(i, k) = normal(rng);
  return m;
}

inline Matrix random_spd(Index k, std::mt19937_64& rng) {
  const Matrix b = randn(k, k, rng);
  return b * b.transpose() / static_cast<double>(k) + 0.5 * Matrix::Identity(k, k);
}

inline IndexSet all_columns(Index p) {
  IndexSet j;
  for (Index k = 0; k < p; ++k) j.push_back(k);
  return j;
}

/// Sigma scattered into a p x p zero matrix, one entry at a time.
inline Matrix scatter(const Matrix& sigma, const IndexSet& j, Index p) {
  Matrix s = Matrix::Zero(p, p);
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < j.size(); ++c)
      s(j[r], j[c]) = sigma(static_cast<Index>(r), static_cast<Index>(c));
  return s;
}

inline Matrix z_of(const Matrix& x) {
  Matrix z(x.rows() + x.cols(), x.cols());
  z << x, -Matrix::Identity(x.cols(), x.cols());
  return z;
}

/// c^T Z (Z^T S Z)^{-1} Z^T c with an explicit inverse.
inline double q_dense(const Vector& c, const Matrix& s, const Matrix& x) {
  const Matrix z = z_of(x);
  const Matrix winv = (z.transpose() * s * z).inverse();
  return (c.transpose() * z * winv * z.transpose() * c)(0, 0);
}

/// a c^T Z - [S_a, S_ab] Z W^{-1} Z^T c c^T Z, explicit inverse.
inline Matrix s_tilde_dense(const Vector& c, const Matrix& s, const Matrix& x) {
  const Index n = x.rows();
  const Matrix z = z_of(x);
  const Matrix winv = (z.transpose() * s * z).inverse();
  const Vector a = c.head(n);
  return a * c.transpose() * z - s.topRows(n) * z * winv * z.transpose() * c * c.transpose() * z;
}

inline Matrix s_dense(const Vector& c, const Matrix& s, const Matrix& x) {
  const Matrix z = z_of(x);
  return s_tilde_dense(c, s, x) * (z.transpose() * s * z).inverse();
}

/// Classical TLS objective sum_i ||(a_i^T X - b_i^T)(X^T X + I)^{-1/2}||^2,
/// with the inverse square root taken from an eigen-decomposition.
inline double tls_objective(const Matrix& c, Index n, const Matrix& x) {
  const Index d = x.cols();
  const Matrix g = x.transpose() * x + Matrix::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const Matrix isqrt = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                       eig.eigenvectors().transpose();
  double total = 0.0;
  for (Index i = 0; i < c.rows(); ++i) {
    const Vector a = c.row(i).head(n).transpose();
    const Vector b = c.row(i).tail(d).transpose();
    total += (isqrt * (x.transpose() * a - b)).squaredNorm();
  }
  return total;
}

/// Singular values of M (descending) from the eigenvalues of M^T M.
inline Vector singular_values_via_gram(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.transpose() * m);
  Vector ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return ev.reverse();
}

/// Golden-section minimization on [lo, hi] to absolute width tol.
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

/// Grid scan of f on [lo, hi] returning the best grid point.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, int points) {
  double best = lo, fbest = f(lo);
  for (int k = 1; k <= points; ++k) {
    const double x = lo + (hi - lo) * k / points;
    const double fx = f(x);
    if (fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  return best;
}

}  // namespace oracle
