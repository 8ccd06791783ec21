#pragma once

#include <iosfwd>
#include <vector>

#include "mlandscape/landscape.hpp"
#include "mlandscape/matrix.hpp"

namespace mlandscape {

struct WeightedEdge {
  Index i;
  Index j;
  double weight;
};

/**
 * Agmon-type pseudo-metric on [0, n): the weighted graph whose edges are the
 * non-zero off-diagonal pairs of A, with
 *
 *   weight(i,j) = ln(1 + sqrt(sqrt(v_i v_j) / |a_ij|)),
 *
 * where v is a shifted effective potential. Distances are shortest-path sums
 * over consecutive pairs of a path.
 */
class AgmonMetric {
 public:
  struct Arc {
    Index to;
    double weight;
  };

  AgmonMetric() = default;
  AgmonMetric(const SparseSymMatrix& a, const ShiftedPotential& sp);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  double threshold() const { return threshold_; }
  const Vector& potential() const { return v_; }

  const Arc* arcs_begin(Index i) const { return arcs_.data() + offsets_[i]; }
  const Arc* arcs_end(Index i) const { return arcs_.data() + offsets_[i + 1]; }

  /// Weight of edge (i,j); +inf if the pair is not an edge.
  double weight(Index i, Index j) const;

  /// One entry per unordered edge, i < j, sorted.
  std::vector<WeightedEdge> edges() const;

 private:
  double threshold_ = 0.0;
  Vector v_;
  std::vector<std::size_t> offsets_;
  std::vector<Arc> arcs_;
};

/// Edge weight formula; zero whenever either potential value is zero.
double agmon_edge_weight(double v_i, double v_j, double a_ij);

AgmonMetric build_metric(const SparseSymMatrix& a, const ShiftedPotential& sp);

/// Multi-source shortest-path distances; +inf where unreachable or the source
/// set is empty.
struct DistanceField {
  IndexSet source;
  std::vector<double> dist;
  /// Predecessor on a shortest path towards the source, -1 at sources and
  /// unreachable nodes.
  std::vector<std::ptrdiff_t> pred;

  /// Path from i to the source set (i first), empty if unreachable.
  std::vector<Index> witness_path(Index i) const;
};

/// Dijkstra with a binary heap; ties are popped smallest index first.
DistanceField distance_from_set(const AgmonMetric& m, const IndexSet& k);
double pairwise_distance(const AgmonMetric& m, Index i, Index j);
/// inf over i in K of rho(i, M); +inf if either set is empty.
double set_distance(const AgmonMetric& m, const IndexSet& k, const IndexSet& target);

/// Sum of edge weights along a path; +inf if some step is not an edge.
double path_length(const AgmonMetric& m, const std::vector<Index>& path);

/// { k in omega : a_kj != 0 for some j outside omega }
IndexSet inner_boundary(const SparseSymMatrix& a, const IndexSet& omega);
/// { j outside omega : a_kj != 0 for some k in omega }
IndexSet outer_boundary(const SparseSymMatrix& a, const IndexSet& omega);

/**
 * Lower bound for the Agmon distance across an interval [i1, iq] of a band
 * matrix with half-bandwidth W on which v >= v_min and |a_ij| <= a_max:
 *
 *   floor((iq - i1 + 1 - W) / W) * ln(1 + sqrt(v_min / a_max)),  clamped at 0.
 *
 * Throws InputError if v_min or a_max is not positive, or iq < i1.
 */
double band_lower_bound(std::size_t half_bandwidth, Index i1, Index iq, double v_min, double a_max);

/// CSV "index,dist" with 1-based index and "inf" for +inf.
void write_distance_csv(std::ostream& out, const DistanceField& f);
/// CSV "i,j,weight" with 1-based indices.
void write_edge_csv(std::ostream& out, const AgmonMetric& m);

}  // namespace mlandscape
