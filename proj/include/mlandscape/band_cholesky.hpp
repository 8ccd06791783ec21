#pragma once

#include <vector>

#include "mlandscape/matrix.hpp"

namespace mlandscape {

/// Banded Cholesky factorization of (A_SS - shift I) for a principal
/// submatrix A_SS. Cost is O(|S| w^2) where w is the bandwidth of A_SS in the
/// compressed ordering of S (never larger than the bandwidth of A).
class BandCholesky {
 public:
  /// Throws NumericalError("not positive definite") on a non-positive pivot.
  BandCholesky(const SparseSymMatrix& a, const IndexSet& subset, double shift = 0.0);

  /// Whole matrix.
  explicit BandCholesky(const SparseSymMatrix& a, double shift = 0.0);

  std::size_t size() const { return n_; }
  std::size_t bandwidth() const { return w_; }

  /// Solves (A_SS - shift I) x = b with b, x indexed like the subset.
  Vector solve(const Vector& b) const;

 private:
  void factor(const SparseSymMatrix& a, const IndexSet& subset, double shift);

  double& at(std::size_t i, std::size_t j) { return band_[i * (w_ + 1) + (i - j)]; }
  double at(std::size_t i, std::size_t j) const { return band_[i * (w_ + 1) + (i - j)]; }

  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<double> band_;
};

}  // namespace mlandscape
