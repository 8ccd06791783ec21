#include "mlandscape/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "mlandscape/band_cholesky.hpp"
#include "mlandscape/csv.hpp"

namespace mlandscape {

namespace {

void fix_signs(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > mag) {
        mag = std::abs(vectors(i, j));
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

std::pair<Vector, Matrix> dense_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

EigenDecomposition eig_sym(const SparseSymMatrix& a, std::size_t dense_limit) {
  if (a.size() > dense_limit) {
    throw InputError("matrix dimension " + std::to_string(a.size()) + " exceeds the dense limit " +
                     std::to_string(dense_limit));
  }
  auto [values, vectors] = dense_eig(a.to_dense());
  fix_signs(vectors);
  return {std::move(values), std::move(vectors)};
}

Vector eigenvalues_sym(const SparseSymMatrix& a, std::size_t dense_limit) {
  if (a.size() > dense_limit) {
    throw InputError("matrix dimension " + std::to_string(a.size()) + " exceeds the dense limit " +
                     std::to_string(dense_limit));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.to_dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return es.eigenvalues();
}

LocalEigenData local_eig(const SparseSymMatrix& a, const IndexSet& domain, std::size_t region_id) {
  if (domain.empty()) throw InputError("local eigenproblem on an empty domain");
  auto [values, sub] = dense_eig(principal_submatrix(a, domain));
  fix_signs(sub);
  LocalEigenData out;
  out.region_id = region_id;
  out.domain = domain;
  out.values = std::move(values);
  out.vectors = Matrix::Zero(static_cast<Eigen::Index>(a.size()), sub.cols());
  for (std::size_t k = 0; k < domain.size(); ++k) {
    out.vectors.row(static_cast<Eigen::Index>(domain[k])) = sub.row(static_cast<Eigen::Index>(k));
  }
  return out;
}

SpectralProjector global_projector(const EigenDecomposition& ed, double lower, double upper) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < ed.values.size(); ++j) {
    if (ed.values(j) > lower && ed.values(j) < upper) keep.push_back(j);
  }
  SpectralProjector p;
  p.lower = lower;
  p.upper = upper;
  p.kind = ProjectorKind::global;
  p.basis.resize(ed.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) p.basis.col(k) = ed.vectors.col(keep[k]);
  return p;
}

SpectralProjector local_projector(std::span<const LocalEigenData> locals, double lower, double upper) {
  SpectralProjector p;
  p.lower = lower;
  p.upper = upper;
  p.kind = ProjectorKind::local_union;
  if (locals.empty()) return p;
  std::vector<Vector> cols;
  for (const auto& l : locals) {
    for (Eigen::Index j = 0; j < l.values.size(); ++j) {
      if (l.values(j) > lower && l.values(j) < upper) cols.push_back(l.vectors.col(j));
    }
  }
  p.basis.resize(locals.front().vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) p.basis.col(k) = cols[k];
  return p;
}

Vector project(const SpectralProjector& p, const Vector& x) {
  if (p.basis.cols() == 0) return Vector::Zero(x.size());
  return p.basis * (p.basis.transpose() * x);
}

std::size_t counting_global(const EigenDecomposition& ed, double lambda) {
  return static_cast<std::size_t>((ed.values.array() <= lambda).count());
}

std::size_t counting_local(std::span<const LocalEigenData> locals, double mu) {
  std::size_t n = 0;
  for (const auto& l : locals) n += static_cast<std::size_t>((l.values.array() <= mu).count());
  return n;
}

EigenQuality eigen_quality(const SparseSymMatrix& a, const EigenDecomposition& ed) {
  EigenQuality q;
  for (Eigen::Index j = 0; j < ed.vectors.cols(); ++j) {
    const Vector r = a.multiply(ed.vectors.col(j)) - ed.values(j) * ed.vectors.col(j);
    q.max_residual = std::max(q.max_residual, r.norm());
  }
  const Matrix gram = ed.vectors.transpose() * ed.vectors;
  q.orthonormality_defect =
      (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return q;
}

TailRefinement refine_tail(const SparseSymMatrix& a, const IndexSet& domain, const Vector& potential,
                           double lambda, const Vector& x, double tail_ratio) {
  TailRefinement out;
  out.vector = x;
  double peak = 0.0;
  for (Index k : domain) peak = std::max(peak, std::abs(x(k)));
  if (peak == 0.0) return out;

  IndexSet tail;
  for (Index k : domain) {
    if (std::abs(x(k)) < tail_ratio * peak) tail.push_back(k);
  }
  if (tail.empty()) return out;

  auto factor = [&](const IndexSet& t) -> std::optional<BandCholesky> {
    try {
      return BandCholesky(a, t, lambda);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };

  auto chol = factor(tail);
  if (!chol) {
    IndexSet barrier;
    for (Index k : tail) {
      if (potential(k) > lambda) barrier.push_back(k);
    }
    tail = std::move(barrier);
    out.shrunk_to_barrier = true;
    if (tail.empty()) return out;
    chol = factor(tail);
    if (!chol) return out;
  }

  const auto in_domain = mask_of(domain, a.size());
  const auto in_tail = mask_of(tail, a.size());
  Vector rhs(static_cast<Eigen::Index>(tail.size()));
  for (std::size_t t = 0; t < tail.size(); ++t) {
    double s = 0.0;
    for (const auto& c : a.row(tail[t])) {
      if (in_domain[c.col] && !in_tail[c.col]) s -= c.value * x(c.col);
    }
    rhs(static_cast<Eigen::Index>(t)) = s;
  }
  const Vector xt = chol->solve(rhs);
  for (std::size_t t = 0; t < tail.size(); ++t) out.vector(tail[t]) = xt(static_cast<Eigen::Index>(t));

  const double norm_in = x.norm();
  const double norm_out = out.vector.norm();
  if (norm_out > 0.0) out.vector *= norm_in / norm_out;
  out.tail_size = tail.size();
  out.applied = true;
  return out;
}

EigenDecomposition refine_tails(const SparseSymMatrix& a, const EigenDecomposition& ed,
                                const Vector& potential, double tail_ratio) {
  EigenDecomposition out = ed;
  const IndexSet all = full_set(a.size());
  for (Eigen::Index j = 0; j < ed.vectors.cols(); ++j) {
    out.vectors.col(j) = refine_tail(a, all, potential, ed.values(j), ed.vectors.col(j), tail_ratio).vector;
  }
  return out;
}

LocalEigenData refine_tails(const SparseSymMatrix& a, const LocalEigenData& local,
                            const Vector& potential, double tail_ratio) {
  LocalEigenData out = local;
  for (Eigen::Index j = 0; j < local.vectors.cols(); ++j) {
    out.vectors.col(j) =
        refine_tail(a, local.domain, potential, local.values(j), local.vectors.col(j), tail_ratio).vector;
  }
  return out;
}

void write_eigenvalues_csv(std::ostream& out, const Vector& values) {
  out << "index,value\n";
  for (Eigen::Index j = 0; j < values.size(); ++j) out << j + 1 << ',' << csv::num(values(j)) << '\n';
}

void write_eigenvectors_csv(std::ostream& out, const Matrix& vectors, std::size_t count) {
  const auto cols = std::min<Eigen::Index>(vectors.cols(), static_cast<Eigen::Index>(count));
  out << "index";
  for (Eigen::Index j = 0; j < cols; ++j) out << ",psi_" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    out << i + 1;
    for (Eigen::Index j = 0; j < cols; ++j) out << ',' << csv::num(vectors(i, j));
    out << '\n';
  }
}

}  // namespace mlandscape
