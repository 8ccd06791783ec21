#pragma once

#include <vector>

#include "mlandscape/agmon.hpp"
#include "mlandscape/matrix.hpp"

namespace mlandscape {

/// Union-find over [0, n) with union by size and path halving.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  Index find(Index x);
  /// Returns false when x and y were already joined.
  bool unite(Index x, Index y);

 private:
  std::vector<Index> parent_;
  std::vector<std::size_t> size_;
};

/**
 * Wells K_l, regions Omega_l and the evaluated separation axioms:
 *   (i)   regions pairwise disjoint, and K_l inside Omega_l;
 *   (ii)  rho(complement of Omega_l, K_l) >= S for every l;
 *   (iii) rho(inner boundary of Omega_l, K_l) >= S for every l.
 * Set distances involving an empty set are +inf.
 */
struct WellPartition {
  std::vector<IndexSet> wells;
  std::vector<IndexSet> regions;
  /// Energy threshold of the metric the partition was built with.
  double threshold = 0.0;
  double s_requested = 0.0;
  /// min_l rho(inner boundary of Omega_l, K_l)
  double s_achieved = kInf;
  /// min over l != l' of rho(K_l, K_l')
  double well_separation = kInf;
  bool axiom_disjoint = false;
  bool axiom_neighborhood = false;
  bool axiom_boundary = false;
  std::vector<double> boundary_distance;
  std::vector<double> exterior_distance;
  /// Indices at infinite distance from every well (assigned to region 0).
  IndexSet unreachable;

  bool holds() const { return axiom_disjoint && axiom_neighborhood && axiom_boundary; }

  /// Largest S for which all three axioms hold with these sets; 0 if
  /// axiom (i) fails.
  double effective_separation() const;
};

struct VoronoiRegions {
  std::vector<IndexSet> regions;
  IndexSet unreachable;
};

/// Connected components of K in the graph a_ij != 0, sorted by smallest member.
std::vector<IndexSet> well_components(const SparseSymMatrix& a, const IndexSet& k);

/// Transitive closure of "rho(K_a, K_b) < min_sep"; every pair of returned
/// groups is at distance >= min_sep. Sorted by smallest member.
std::vector<IndexSet> merge_close_wells(const std::vector<IndexSet>& components, const AgmonMetric& m,
                                        double min_sep);

/// Each index goes to the nearest well (ties: lowest well id); indices at
/// infinite distance from every well go to well 0 and are listed.
VoronoiRegions voronoi_regions(const SparseSymMatrix& a, const std::vector<IndexSet>& wells,
                               const AgmonMetric& m);

/// Evaluates the axioms literally; failures are reported, never thrown.
WellPartition verify_separation(const SparseSymMatrix& a, const std::vector<IndexSet>& wells,
                                const std::vector<IndexSet>& regions, const AgmonMetric& m, double s);

/// Default merge threshold 2S + 1e-9.
double default_min_separation(double s);

/**
 * Components of the metric's well set, merged below `min_sep`, Voronoi
 * regions, then verification at S. A negative min_sep selects the default.
 */
WellPartition build_partition(const SparseSymMatrix& a, const AgmonMetric& m, const IndexSet& wells,
                              double s, double min_sep = -1.0);

}  // namespace mlandscape
