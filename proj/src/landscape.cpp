#include "mlandscape/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mlandscape/band_cholesky.hpp"
#include "mlandscape/csv.hpp"

namespace mlandscape {

namespace {

Vector effective_potential(const Vector& au, const Vector& u) {
  return au.cwiseQuotient(u);
}

}  // namespace

LandscapeData solve_landscape(const SparseSymMatrix& a) {
  const BandCholesky chol(a);
  const Vector ones = Vector::Ones(static_cast<Eigen::Index>(a.size()));
  Vector u = chol.solve(ones);
  Vector au = a.multiply(u);
  double residual = (au - ones).lpNorm<Eigen::Infinity>();

  const double tol = 1e-10 * std::max(1.0, a.max_abs());
  if (residual > tol) {
    u += chol.solve(ones - au);
    au = a.multiply(u);
    residual = (au - ones).lpNorm<Eigen::Infinity>();
  }
  if (!u.allFinite()) throw NumericalError("landscape solve produced non-finite values");
  if ((u.array() <= 0.0).any()) throw NumericalError("landscape not positive");

  LandscapeData l;
  l.vbar = effective_potential(au, u);
  l.u = std::move(u);
  l.residual_inf = residual;
  return l;
}

LandscapeData landscape_from_vector(const SparseSymMatrix& a, const Vector& u) {
  if (static_cast<std::size_t>(u.size()) != a.size()) throw InputError("dimension mismatch");
  if ((u.array() <= 0.0).any() || !u.allFinite()) {
    throw InputError("landscape vector must be strictly positive");
  }
  const Vector au = a.multiply(u);
  LandscapeData l;
  l.u = u;
  l.vbar = effective_potential(au, u);
  l.residual_inf = (au - Vector::Ones(u.size())).lpNorm<Eigen::Infinity>();
  return l;
}

ShiftedPotential shift_potential(const Vector& potential, double threshold) {
  ShiftedPotential sp;
  sp.threshold = threshold;
  sp.v.resize(potential.size());
  for (Eigen::Index i = 0; i < potential.size(); ++i) {
    if (potential(i) <= threshold) {
      sp.v(i) = 0.0;
      sp.wells.push_back(static_cast<Index>(i));
    } else {
      sp.v(i) = potential(i) - threshold;
    }
  }
  return sp;
}

ShiftedPotential shift_potential(const LandscapeData& l, double threshold) {
  return shift_potential(l.vbar, threshold);
}

void write_landscape_csv(std::ostream& out, const LandscapeData& l, const ShiftedPotential& sp) {
  out << "index,u,vbar,v,in_well\n";
  const auto wells = mask_of(sp.wells, static_cast<std::size_t>(l.u.size()));
  for (Eigen::Index i = 0; i < l.u.size(); ++i) {
    out << i + 1 << ',' << csv::num(l.u(i)) << ',' << csv::num(l.vbar(i)) << ','
        << csv::num(sp.v(i)) << ',' << (wells[i] ? 1 : 0) << '\n';
  }
}

}  // namespace mlandscape
