#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlandscape/agmon.hpp"
#include "mlandscape/landscape.hpp"
#include "mlandscape/partition.hpp"
#include "mlandscape/spectral.hpp"

namespace mlandscape {

/// Relative slack applied to every proved inequality.
inline constexpr double kRelSlack = 1e-9;
/// Relative tolerance of the two-route identities.
inline constexpr double kIdentityTol = 1e-10;
/// Squared-norm floor below which a projection defect counts as exactly zero.
inline constexpr double kDefectFloor = 1e-20;

/// Connectivity used by the bounds: max(2, connectivity(A)).
std::size_t effective_connectivity(const SparseSymMatrix& a);

/**
 * Weighted exponential localization sum against the Agmon distance to a well
 * set. `lhs_first` carries the (Ebar - E) term, `lhs_second` the
 * potential-weighted term with its coefficient 1 - alpha^2 W_c / 2 applied.
 */
struct LocalizationReport {
  std::size_t eigen_id = 0;
  double energy = 0.0;
  double threshold = 0.0;
  double alpha = 0.0;
  IndexSet excluded;
  double lhs_first = 0.0;
  double lhs_second = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double max_margin = 0.0;

  double lhs() const { return lhs_first + lhs_second; }
};

enum class DecouplingDirection { local_to_global, global_to_local };

struct DecouplingReport {
  DecouplingDirection direction = DecouplingDirection::local_to_global;
  std::size_t region_id = 0;
  std::size_t eigen_id = 0;
  double eigenvalue = 0.0;
  double delta = 0.0;
  double separation = 0.0;
  double residual_norm_sq = 0.0;
  double defect_sq = 0.0;
  double bound = 0.0;
  /// ||r||^2 >= delta^2 defect_sq
  bool spectral_step_holds = false;
  bool holds = false;
};

struct CountingPoint {
  double mu = 0.0;
  std::size_t global_at_mu = 0;
  std::size_t local_at_mu = 0;
  std::size_t global_below = 0;  // N(mu - delta)
  std::size_t local_below = 0;   // N0(mu - delta)
  bool first_holds = false;      // min(Nbar, N0(mu - delta)) <= N(mu)
  bool second_holds = false;     // min(Nbar, N(mu - delta)) <= N0(mu)
};

struct CountingReport {
  double delta = 0.0;
  double threshold = 0.0;
  double separation = 0.0;
  /// Largest Nbar with (W_c^2 / delta^3) a_max^3 Nbar < exp(2 S / sqrt(W_c)),
  /// saturated at `nbar_cap`.
  std::size_t nbar = 0;
  bool nbar_saturated = false;
  std::vector<CountingPoint> points;
  bool all_hold = false;
};

struct ScatterData {
  std::size_t eigen_id = 0;
  double energy = 0.0;
  Index i_max = 0;
  double floor = 1e-17;
  std::vector<std::pair<double, double>> points;  // (rho(i, i_max), -ln|psi_i|)
  double fitted_slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
};

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double max_abs_diff = 0.0;
  bool holds = false;
  /// Only evaluated for a Z-matrix with a constant-sign vector.
  std::optional<bool> nonpositive;
};

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Landscape localization of eigenpair j: potential 1/u, threshold lambda_j,
/// rate 1/sqrt(W_c), bound W_c max|a_ij| over all entries.
LocalizationReport check_landscape_localization(const SparseSymMatrix& a, const LandscapeData& l,
                                                const EigenDecomposition& ed, std::size_t j);

/**
 * General localization inequality for a local eigenvector phi on the
 * complement of `excluded` with eigenvalue E <= Ebar, landscape vector u and
 * rate 0 < alpha <= sqrt(2 / W_c). Throws InputError("empty relative well
 * set") when K_Ebar minus `excluded` is empty.
 */
LocalizationReport check_general_localization(const SparseSymMatrix& a, const Vector& u, const Vector& phi,
                                              double energy, double threshold, const IndexSet& excluded,
                                              double alpha, std::size_t eigen_id = 0);

/// <[[A,D],D]u,u> by matrix products against sum_{i!=j} a_ij u_i u_j (d_i - d_j)^2.
IdentityCheck check_commutator_identity(const Matrix& a, const Vector& d, const Vector& u);

/// <G[Psi,A]u, G Psi u> against 1/2 <[[A,G Psi],G Psi]u,u> - 1/2 <[[A,G],G] Psi u, Psi u>
/// for diagonal Psi and G.
IdentityCheck check_double_commutator_lemma(const Matrix& a, const Vector& psi, const Vector& g,
                                            const Vector& u);

/// sum_k phi_k^2 g_k^2 ((Au)_k/u_k - E) <= -1/2 sum_{i!=j} a_ij phi_i phi_j (g_i - g_j)^2.
InequalityCheck check_dc_corollary(const SparseSymMatrix& a, const Vector& u, const Vector& phi, double energy,
                                   const Vector& g);

/// Local-to-global decoupling for local eigenpair j of `local`. Throws
/// InputError if the partition fails its axioms, was built at another
/// threshold, or mu > Ebar - delta.
DecouplingReport check_decoupling_local(const SparseSymMatrix& a, const WellPartition& partition,
                                        const LocalEigenData& local, const EigenDecomposition& ed,
                                        std::size_t j, double delta, double threshold);

/// Global-to-local decoupling for global eigenpair j.
DecouplingReport check_decoupling_global(const SparseSymMatrix& a, const WellPartition& partition,
                                         const EigenDecomposition& ed, std::span<const LocalEigenData> locals,
                                         std::size_t j, double delta, double threshold);

/// Decoupling bound (W_c^2 / delta^3) a_max^3 exp(-2 S / sqrt(W_c)) ||x||^2.
double decoupling_bound(std::size_t wc, double a_max, double delta, double separation, double norm_sq = 1.0);

std::size_t counting_nbar(std::size_t wc, double a_max, double delta, double separation, std::size_t cap,
                          bool* saturated = nullptr);

CountingReport check_counting(const EigenDecomposition& ed, std::span<const LocalEigenData> locals,
                              double delta, double threshold, double separation, std::size_t wc, double a_max,
                              std::size_t grid_points = 50);

/// Scatter of -ln|psi_i| against rho(i, i_max) with threshold lambda_j and
/// potential 1/u; least-squares slope and Pearson correlation.
ScatterData agmon_scatter(const SparseSymMatrix& a, const LandscapeData& l, const EigenDecomposition& ed,
                          std::size_t j, double floor = 1e-17);

/// Least squares y = slope x + intercept and Pearson r.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
};
LinearFit fit_line(const std::vector<std::pair<double, double>>& points);

// -- sweeps -------------------------------------------------------------------

struct VerifyOptions {
  /// Thresholds Ebar = E + offset for the general localization check.
  std::vector<double> ebar_offsets{0.0, 0.2};
  /// Rates for the general check; empty selects sqrt(1/W_c) and sqrt(2/W_c).
  std::vector<double> alphas;
  /// Thresholds at which wells are partitioned and decoupling is checked.
  std::vector<double> partition_thresholds;
  double s_requested = 2.0;
  double delta = 0.05;
  std::size_t counting_grid = 50;
  bool refine_tails = true;
  double tail_ratio = 1e-6;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
  std::size_t identity_instances = 20;
  /// Applied to the (refined) global eigendecomposition before any check.
  std::function<void(EigenDecomposition&)> eigen_hook;
};

struct PartitionRun {
  double threshold = 0.0;
  WellPartition partition;
  /// True when the requested S failed and the sets were re-verified at the
  /// separation they achieve.
  bool relaxed = false;
  double separation = 0.0;
  double bound = 0.0;
  std::vector<LocalizationReport> local_localization;
  std::vector<DecouplingReport> local_to_global;
  std::vector<DecouplingReport> global_to_local;
  std::optional<CountingReport> counting;
};

struct VerificationBundle {
  MatrixClass matrix_class;
  std::size_t wc = 0;
  double a_max = 0.0;
  double landscape_residual = 0.0;
  EigenQuality eigen_quality;
  std::vector<LocalizationReport> landscape_localization;
  std::vector<LocalizationReport> general_localization;
  std::size_t general_skipped_empty = 0;
  std::vector<InequalityCheck> corollary;
  std::vector<IdentityCheck> identities;
  std::vector<PartitionRun> partitions;

  std::size_t failures() const;
  bool all_hold() const { return failures() == 0; }
};

/// Full verifier sweep over one M-matrix. Throws NumericalError when the
/// landscape or eigensolve fails and InputError for a non-M input.
VerificationBundle verify_matrix(const SparseSymMatrix& a, const VerifyOptions& opts);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace mlandscape
