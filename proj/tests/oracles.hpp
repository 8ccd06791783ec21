#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mlandscape/matrix.hpp"

namespace oracle {

using mlandscape::Index;
using mlandscape::kInf;
using mlandscape::Matrix;
using mlandscape::Vector;

/// Gaussian elimination with partial pivoting on a dense copy.
inline Vector gauss_solve(Matrix a, Vector b) {
  const auto n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    a.row(k).swap(a.row(p));
    std::swap(b(k), b(p));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (Eigen::Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b(i) -= f * b(k);
    }
  }
  Vector x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
    x(i) = s / a(i, i);
  }
  return x;
}

/// Minimum weight over all simple paths from `from` to any node of `targets`,
/// by exhaustive depth-first enumeration. w(i,j) = +inf marks a non-edge.
inline double simple_path_distance(const Matrix& w, Index from, const std::vector<Index>& targets) {
  const auto n = static_cast<Index>(w.rows());
  std::vector<bool> is_target(n, false);
  for (Index t : targets) is_target[t] = true;
  std::vector<bool> on_path(n, false);
  double best = kInf;
  std::function<void(Index, double)> dfs = [&](Index at, double len) {
    if (is_target[at]) best = std::min(best, len);
    on_path[at] = true;
    for (Index next = 0; next < n; ++next) {
      if (on_path[next] || !std::isfinite(w(at, next))) continue;
      dfs(next, len + w(at, next));
    }
    on_path[at] = false;
  };
  dfs(from, 0.0);
  return best;
}

/// Random symmetric Z-matrix with the given off-diagonal density; the diagonal
/// is uniform in [lo, hi].
inline mlandscape::SparseSymMatrix random_z_matrix(std::size_t n, double density, double lo, double hi,
                                                   std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  mlandscape::SparseSymMatrix::Builder b(n);
  for (Index i = 0; i < n; ++i) {
    b.set(i, i, lo + (hi - lo) * unit(gen));
    for (Index j = i + 1; j < n; ++j) {
      if (unit(gen) < density) b.set(i, j, -unit(gen));
    }
  }
  return std::move(b).build();
}

/// Random symmetric Z-matrix made positive definite by a diagonal shift.
inline mlandscape::SparseSymMatrix random_m_matrix(std::size_t n, double density, std::mt19937_64& gen) {
  auto z = random_z_matrix(n, density, -1.0, 1.0, gen);
  Eigen::SelfAdjointEigenSolver<Matrix> es(z.to_dense(), Eigen::EigenvaluesOnly);
  return z.shifted(0.2 - es.eigenvalues()(0));
}

/// Block-diagonal M-matrix with the given tridiagonal blocks (diagonal d, coupling -c).
inline mlandscape::SparseSymMatrix block_diagonal(const std::vector<std::size_t>& sizes,
                                                  const std::vector<double>& diag, double c) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  mlandscape::SparseSymMatrix::Builder b(n);
  Index start = 0;
  std::size_t k = 0;
  for (auto s : sizes) {
    for (Index i = start; i < start + s; ++i) {
      b.set(i, i, diag[k++ % diag.size()]);
      if (i + 1 < start + s) b.set(i, i + 1, -c);
    }
    start += s;
  }
  return std::move(b).build();
}

}  // namespace oracle
