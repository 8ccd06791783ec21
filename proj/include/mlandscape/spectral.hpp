#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "mlandscape/matrix.hpp"

namespace mlandscape {

inline constexpr std::size_t kDenseLimit = 5000;

/// Ascending eigenvalues; column j of `vectors` pairs with values(j).
struct EigenDecomposition {
  Vector values;
  Matrix vectors;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

/// Eigenpairs of the principal submatrix on `domain`, embedded as n-vectors
/// that vanish outside the domain.
struct LocalEigenData {
  std::size_t region_id = 0;
  IndexSet domain;
  Vector values;
  Matrix vectors;
};

enum class ProjectorKind { global, local_union };

/// Orthogonal projection onto span(basis), the eigenvectors whose eigenvalue
/// lies strictly inside (lower, upper).
struct SpectralProjector {
  Matrix basis;
  double lower = 0.0;
  double upper = 0.0;
  ProjectorKind kind = ProjectorKind::global;

  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }
};

/**
 * Dense symmetric eigendecomposition (Householder tridiagonalization followed
 * by implicit symmetric QR). Each eigenvector's largest-magnitude component is
 * made positive, ties resolved at the lowest index.
 */
EigenDecomposition eig_sym(const SparseSymMatrix& a, std::size_t dense_limit = kDenseLimit);

/// Ascending eigenvalues only.
Vector eigenvalues_sym(const SparseSymMatrix& a, std::size_t dense_limit = kDenseLimit);

/// Throws InputError for an empty domain.
LocalEigenData local_eig(const SparseSymMatrix& a, const IndexSet& domain, std::size_t region_id = 0);

SpectralProjector global_projector(const EigenDecomposition& ed, double lower, double upper);
SpectralProjector local_projector(std::span<const LocalEigenData> locals, double lower, double upper);

Vector project(const SpectralProjector& p, const Vector& x);

/// #{ j : lambda_j <= lambda }
std::size_t counting_global(const EigenDecomposition& ed, double lambda);
/// #{ (l, j) : mu_{l,j} <= mu }
std::size_t counting_local(std::span<const LocalEigenData> locals, double mu);

/// max_j ||A psi_j - lambda_j psi_j||_2 and max |<psi_i, psi_j> - delta_ij|.
struct EigenQuality {
  double max_residual = 0.0;
  double orthonormality_defect = 0.0;
};
EigenQuality eigen_quality(const SparseSymMatrix& a, const EigenDecomposition& ed);

/**
 * Recomputes the exponentially small tail of an approximate eigenvector so
 * that its tiny components carry relative rather than absolute accuracy.
 *
 * Let T be the indices of `domain` where |x_k| < tail_ratio * max|x|. The tail
 * is re-solved from the eigen-equation restricted to T,
 *
 *   (A_TT - lambda I) x_T = -A_TC x_C,   C = domain \ T,
 *
 * which holds exactly for an exact eigenpair. If A_TT - lambda I is not
 * positive definite, T is first shrunk to the indices with potential_k >
 * lambda; on that set A_TT - lambda I is an M-matrix whenever potential is
 * the effective potential (Au)_k / u_k of a positive u. The result is
 * renormalized to the input norm.
 */
struct TailRefinement {
  Vector vector;
  std::size_t tail_size = 0;
  bool shrunk_to_barrier = false;
  bool applied = false;
};
TailRefinement refine_tail(const SparseSymMatrix& a, const IndexSet& domain, const Vector& potential,
                           double lambda, const Vector& x, double tail_ratio = 1e-6);

/// refine_tail applied to every eigenpair.
EigenDecomposition refine_tails(const SparseSymMatrix& a, const EigenDecomposition& ed,
                                const Vector& potential, double tail_ratio = 1e-6);
LocalEigenData refine_tails(const SparseSymMatrix& a, const LocalEigenData& local,
                            const Vector& potential, double tail_ratio = 1e-6);

/// CSV "index,value" (1-based).
void write_eigenvalues_csv(std::ostream& out, const Vector& values);
/// Column-major CSV: header "index,psi_1,...,psi_k", one row per component.
void write_eigenvectors_csv(std::ostream& out, const Matrix& vectors, std::size_t count);

}  // namespace mlandscape
