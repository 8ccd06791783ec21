#include "mlandscape/partition.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace mlandscape {

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  for (Index i = 0; i < n; ++i) parent_[i] = i;
}

Index DisjointSets::find(Index x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(Index x, Index y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  return true;
}

double WellPartition::effective_separation() const {
  if (!axiom_disjoint) return 0.0;
  double s = kInf;
  for (double d : boundary_distance) s = std::min(s, d);
  for (double d : exterior_distance) s = std::min(s, d);
  return s;
}

namespace {

std::vector<IndexSet> groups_of(DisjointSets& ds, const std::vector<IndexSet>& parts) {
  std::map<Index, IndexSet> by_root;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto& g = by_root[ds.find(p)];
    g.insert(g.end(), parts[p].begin(), parts[p].end());
  }
  std::vector<IndexSet> out;
  for (auto& [root, g] : by_root) out.push_back(std::move(normalize(g)));
  std::sort(out.begin(), out.end(), [](const IndexSet& x, const IndexSet& y) { return x.front() < y.front(); });
  return out;
}

}  // namespace

std::vector<IndexSet> well_components(const SparseSymMatrix& a, const IndexSet& k) {
  const auto in = mask_of(k, a.size());
  std::vector<bool> seen(a.size(), false);
  std::vector<IndexSet> out;
  for (Index s : k) {
    if (seen[s]) continue;
    IndexSet comp;
    std::deque<Index> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const Index x = queue.front();
      queue.pop_front();
      comp.push_back(x);
      for (const auto& c : a.row(x)) {
        if (in[c.col] && !seen[c.col]) {
          seen[c.col] = true;
          queue.push_back(c.col);
        }
      }
    }
    out.push_back(std::move(normalize(comp)));
  }
  // k is sorted, so components already appear by smallest member
  return out;
}

std::vector<IndexSet> merge_close_wells(const std::vector<IndexSet>& components, const AgmonMetric& m,
                                        double min_sep) {
  const std::size_t c = components.size();
  if (c <= 1) return components;
  DisjointSets ds(c);
  for (std::size_t p = 0; p < c; ++p) {
    const auto field = distance_from_set(m, components[p]);
    for (std::size_t q = p + 1; q < c; ++q) {
      double d = kInf;
      for (Index i : components[q]) d = std::min(d, field.dist[i]);
      if (d < min_sep) ds.unite(p, q);
    }
  }
  return groups_of(ds, components);
}

VoronoiRegions voronoi_regions(const SparseSymMatrix& a, const std::vector<IndexSet>& wells,
                               const AgmonMetric& m) {
  VoronoiRegions out;
  const std::size_t n = a.size();
  out.regions.resize(wells.size());
  if (wells.empty()) return out;

  std::vector<double> best(n, kInf);
  std::vector<std::size_t> owner(n, 0);
  for (std::size_t l = 0; l < wells.size(); ++l) {
    const auto field = distance_from_set(m, wells[l]);
    for (Index i = 0; i < n; ++i) {
      if (field.dist[i] < best[i]) {
        best[i] = field.dist[i];
        owner[i] = l;
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (best[i] == kInf) out.unreachable.push_back(i);
    out.regions[owner[i]].push_back(i);
  }
  return out;
}

WellPartition verify_separation(const SparseSymMatrix& a, const std::vector<IndexSet>& wells,
                                const std::vector<IndexSet>& regions, const AgmonMetric& m, double s) {
  WellPartition p;
  p.wells = wells;
  p.regions = regions;
  p.threshold = m.threshold();
  p.s_requested = s;

  const std::size_t n = a.size();
  p.axiom_disjoint = wells.size() == regions.size();
  std::vector<int> seen(n, 0);
  for (const auto& r : regions) {
    for (Index i : r) {
      if (i >= n || ++seen[i] > 1) p.axiom_disjoint = false;
    }
  }
  for (std::size_t l = 0; l < std::min(wells.size(), regions.size()); ++l) {
    if (!std::includes(regions[l].begin(), regions[l].end(), wells[l].begin(), wells[l].end())) {
      p.axiom_disjoint = false;
    }
  }

  p.axiom_neighborhood = true;
  p.axiom_boundary = true;
  for (std::size_t l = 0; l < wells.size(); ++l) {
    const auto field = distance_from_set(m, wells[l]);
    const IndexSet& omega = l < regions.size() ? regions[l] : IndexSet{};
    const auto in = mask_of(omega, n);

    double ext = kInf;
    if (!wells[l].empty()) {
      for (Index i = 0; i < n; ++i) {
        if (!in[i]) ext = std::min(ext, field.dist[i]);
      }
    }
    double bdry = kInf;
    if (!wells[l].empty()) {
      for (Index i : inner_boundary(a, omega)) bdry = std::min(bdry, field.dist[i]);
    }
    p.exterior_distance.push_back(ext);
    p.boundary_distance.push_back(bdry);
    if (!(ext >= s)) p.axiom_neighborhood = false;
    if (!(bdry >= s)) p.axiom_boundary = false;
    p.s_achieved = std::min(p.s_achieved, bdry);

    for (std::size_t q = l + 1; q < wells.size(); ++q) {
      double d = kInf;
      for (Index i : wells[q]) d = std::min(d, field.dist[i]);
      if (wells[l].empty()) d = kInf;
      p.well_separation = std::min(p.well_separation, d);
    }
  }
  return p;
}

double default_min_separation(double s) { return 2.0 * s + 1e-9; }

WellPartition build_partition(const SparseSymMatrix& a, const AgmonMetric& m, const IndexSet& wells,
                              double s, double min_sep) {
  if (min_sep < 0.0) min_sep = default_min_separation(s);
  const auto groups = merge_close_wells(well_components(a, wells), m, min_sep);
  auto vor = voronoi_regions(a, groups, m);
  auto p = verify_separation(a, groups, vor.regions, m, s);
  p.unreachable = std::move(vor.unreachable);
  return p;
}

}  // namespace mlandscape
