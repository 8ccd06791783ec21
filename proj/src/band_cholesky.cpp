#include "mlandscape/band_cholesky.hpp"

#include <algorithm>
#include <cmath>

namespace mlandscape {

BandCholesky::BandCholesky(const SparseSymMatrix& a, const IndexSet& subset, double shift) {
  factor(a, subset, shift);
}

BandCholesky::BandCholesky(const SparseSymMatrix& a, double shift) {
  factor(a, full_set(a.size()), shift);
}

void BandCholesky::factor(const SparseSymMatrix& a, const IndexSet& subset, double shift) {
  n_ = subset.size();
  std::vector<std::ptrdiff_t> local(a.size(), -1);
  for (std::size_t k = 0; k < n_; ++k) local.at(subset[k]) = static_cast<std::ptrdiff_t>(k);

  w_ = 0;
  for (std::size_t k = 0; k < n_; ++k) {
    for (const auto& c : a.row(subset[k])) {
      const auto l = local[c.col];
      if (l >= 0 && static_cast<std::size_t>(l) < k) w_ = std::max(w_, k - static_cast<std::size_t>(l));
    }
  }

  band_.assign(n_ * (w_ + 1), 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    at(k, k) = a.diag(subset[k]) - shift;
    for (const auto& c : a.row(subset[k])) {
      const auto l = local[c.col];
      if (l >= 0 && static_cast<std::size_t>(l) < k) at(k, static_cast<std::size_t>(l)) = c.value;
    }
  }

  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t lo = j > w_ ? j - w_ : 0;
    double s = at(j, j);
    for (std::size_t k = lo; k < j; ++k) s -= at(j, k) * at(j, k);
    if (!(s > 0.0)) throw NumericalError("not positive definite");
    const double d = std::sqrt(s);
    at(j, j) = d;
    const std::size_t hi = std::min(n_ - 1, j + w_);
    for (std::size_t i = j + 1; i <= hi; ++i) {
      const std::size_t lo_i = i > w_ ? i - w_ : 0;
      double t = at(i, j);
      for (std::size_t k = std::max(lo, lo_i); k < j; ++k) t -= at(i, k) * at(j, k);
      at(i, j) = t / d;
    }
  }
}

Vector BandCholesky::solve(const Vector& b) const {
  if (static_cast<std::size_t>(b.size()) != n_) throw InputError("dimension mismatch in solve");
  Vector x = b;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > w_ ? i - w_ : 0;
    double s = x(i);
    for (std::size_t k = lo; k < i; ++k) s -= at(i, k) * x(k);
    x(i) = s / at(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    const std::size_t hi = std::min(n_ - 1, ii + w_);
    double s = x(ii);
    for (std::size_t k = ii + 1; k <= hi; ++k) s -= at(k, ii) * x(k);
    x(ii) = s / at(ii, ii);
  }
  return x;
}

}  // namespace mlandscape
