#pragma once

#include <iosfwd>

#include "mlandscape/matrix.hpp"

namespace mlandscape {

/// Landscape u, effective potential vbar_i = (Au)_i / u_i and ||Au - 1||_inf.
struct LandscapeData {
  Vector u;
  Vector vbar;
  double residual_inf = 0.0;

  /// 1 / u_i. Equals vbar when Au = 1 holds exactly; the two differ at
  /// roundoff for a computed u.
  Vector inverse_u() const { return u.cwiseInverse(); }
};

/// v_i = (vbar_i - threshold)_+ and wells = { i : vbar_i <= threshold }.
struct ShiftedPotential {
  double threshold = 0.0;
  Vector v;
  IndexSet wells;
};

/**
 * Solves Au = 1 by banded Cholesky, with one step of iterative refinement
 * when the residual exceeds 1e-10 max(1, max|a_ij|).
 *
 * Throws NumericalError("not positive definite") if the factorization breaks
 * down and NumericalError("landscape not positive") if some u_i <= 0.
 */
LandscapeData solve_landscape(const SparseSymMatrix& a);

/// vbar for an arbitrary strictly positive u. Throws InputError otherwise.
LandscapeData landscape_from_vector(const SparseSymMatrix& a, const Vector& u);

/// Threshold against the given potential (vbar, or 1/u for the landscape form).
ShiftedPotential shift_potential(const Vector& potential, double threshold);
ShiftedPotential shift_potential(const LandscapeData& l, double threshold);

/// CSV with header index,u,vbar,v,in_well (1-based index).
void write_landscape_csv(std::ostream& out, const LandscapeData& l, const ShiftedPotential& sp);

}  // namespace mlandscape
