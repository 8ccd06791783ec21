#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mlandscape/types.hpp"

namespace mlandscape {

/// One stored upper-triangle entry (row <= col), zero-based.
struct Entry {
  Index row;
  Index col;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Off-diagonal neighbor of a row.
struct Coupling {
  Index col;
  double value;
};

/**
 * Real symmetric n x n matrix in sparse symmetric storage.
 *
 * Every diagonal entry is stored (possibly zero). Off-diagonal entries are
 * stored only when non-zero; both (i,j) and (j,i) resolve to the same value.
 * Immutable after construction.
 */
class SparseSymMatrix {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t n);

    /// Zero-based. (i,j) and (j,i) address the same entry; a second write to
    /// the same pair throws. Off-diagonal zeros are accepted and dropped.
    Builder& set(Index i, Index j, double value);

    SparseSymMatrix build() &&;

   private:
    std::size_t n_;
    std::vector<double> diag_;
    std::vector<bool> diag_set_;
    std::vector<Entry> off_;
  };

  SparseSymMatrix() = default;

  static SparseSymMatrix from_dense(const Matrix& dense);
  static SparseSymMatrix diagonal(const Vector& d);

  std::size_t size() const { return diag_.size(); }

  /// Value at (i,j); zero for unstored off-diagonal pairs.
  double operator()(Index i, Index j) const;
  double diag(Index i) const { return diag_[i]; }
  const std::vector<double>& diagonal_entries() const { return diag_; }

  /// Non-zero off-diagonal entries of row i, sorted by column.
  std::span<const Coupling> row(Index i) const;

  /// Upper triangle including the full diagonal, sorted row-major.
  std::vector<Entry> upper_entries() const;

  std::size_t offdiag_nonzeros() const { return cols_.size() / 2; }

  /// max |i - j| over stored non-zeros.
  std::size_t bandwidth() const;
  /// max |a_ij| over every entry, diagonal included.
  double max_abs() const;
  double frobenius_norm() const;

  Vector multiply(const Vector& x) const;
  Matrix to_dense() const;

  /// Copy with `shift` added to every diagonal entry.
  SparseSymMatrix shifted(double shift) const;

  friend bool operator==(const SparseSymMatrix& a, const SparseSymMatrix& b);

 private:
  std::vector<double> diag_;
  std::vector<std::size_t> row_ptr_;
  std::vector<Coupling> cols_;
};

struct MatrixClass {
  bool is_z = false;
  /// Absent when the spectrum was not computed.
  std::optional<bool> is_m;
  std::size_t connectivity = 0;
  std::optional<double> min_eigenvalue;
  /// |lambda_min| <= 1e-12; such matrices are never classified as M.
  bool near_singular = false;
};

struct EnsembleConfig {
  std::size_t n = 1000;
  std::size_t half_bandwidth = 1;
  double epsilon = 0.1;
  std::uint64_t seed = 0;

  /// Throws InputError unless n >= 1, 1 <= half_bandwidth < n, epsilon > 0.
  void validate() const;
};

struct EnsembleSample {
  SparseSymMatrix matrix;
  /// a = epsilon - lambda0, added to the diagonal.
  double shift = 0.0;
  /// Smallest eigenvalue of the unshifted matrix.
  double lambda0 = 0.0;
};

/// Largest number of non-zero off-diagonal entries in any row.
std::size_t connectivity(const SparseSymMatrix& a);

MatrixClass classify(const SparseSymMatrix& a, bool compute_spectrum);

/**
 * Random band Z-matrix shifted to have smallest eigenvalue epsilon.
 *
 * Diagonal entries are standard normal draws; the first W superdiagonals are
 * minus the absolute value of standard normal draws; the matrix is then
 * shifted by a = epsilon - lambda_min. Draw order and substreams are
 * documented in rng.hpp.
 */
EnsembleSample generate_band_ensemble(const EnsembleConfig& cfg);

/// Same construction from explicit draws: `diag` has n entries and
/// `super[d-1]` holds the n-d raw normal draws for superdiagonal d.
EnsembleSample band_ensemble_from_draws(const std::vector<double>& diag,
                                        const std::vector<std::vector<double>>& super,
                                        double epsilon);

/// I_M A I_M, dimension preserved. Throws InputError on out-of-range indices.
SparseSymMatrix restrict_to(const SparseSymMatrix& a, const IndexSet& m);

/// Principal submatrix on `m` as a dense |m| x |m| matrix.
Matrix principal_submatrix(const SparseSymMatrix& a, const IndexSet& m);

/// Matrix Market coordinate format, real symmetric, lower triangle, 1-based.
void write_matrix(const SparseSymMatrix& a, const std::filesystem::path& path);
SparseSymMatrix read_matrix(const std::filesystem::path& path);

}  // namespace mlandscape
