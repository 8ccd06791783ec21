#include "mlandscape/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <queue>

#include "mlandscape/csv.hpp"

namespace mlandscape {

double agmon_edge_weight(double v_i, double v_j, double a_ij) {
  if (v_i == 0.0 || v_j == 0.0) return 0.0;
  return std::log1p(std::sqrt(std::sqrt(v_i) * std::sqrt(v_j) / std::abs(a_ij)));
}

AgmonMetric::AgmonMetric(const SparseSymMatrix& a, const ShiftedPotential& sp)
    : threshold_(sp.threshold), v_(sp.v) {
  if (static_cast<std::size_t>(sp.v.size()) != a.size()) {
    throw InputError("potential and matrix dimensions differ");
  }
  const std::size_t n = a.size();
  offsets_.assign(n + 1, 0);
  for (Index i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + a.row(i).size();
  arcs_.reserve(offsets_[n]);
  for (Index i = 0; i < n; ++i) {
    for (const auto& c : a.row(i)) {
      arcs_.push_back({c.col, agmon_edge_weight(v_(i), v_(c.col), c.value)});
    }
  }
}

double AgmonMetric::weight(Index i, Index j) const {
  for (auto* p = arcs_begin(i); p != arcs_end(i); ++p) {
    if (p->to == j) return p->weight;
  }
  return kInf;
}

std::vector<WeightedEdge> AgmonMetric::edges() const {
  std::vector<WeightedEdge> out;
  for (Index i = 0; i < size(); ++i) {
    for (auto* p = arcs_begin(i); p != arcs_end(i); ++p) {
      if (p->to > i) out.push_back({i, p->to, p->weight});
    }
  }
  return out;
}

AgmonMetric build_metric(const SparseSymMatrix& a, const ShiftedPotential& sp) {
  return AgmonMetric(a, sp);
}

std::vector<Index> DistanceField::witness_path(Index i) const {
  std::vector<Index> path;
  if (!std::isfinite(dist.at(i))) return path;
  std::ptrdiff_t cur = static_cast<std::ptrdiff_t>(i);
  while (cur >= 0) {
    path.push_back(static_cast<Index>(cur));
    cur = pred[static_cast<std::size_t>(cur)];
  }
  return path;
}

DistanceField distance_from_set(const AgmonMetric& m, const IndexSet& k) {
  const std::size_t n = m.size();
  DistanceField f;
  f.source = k;
  f.dist.assign(n, kInf);
  f.pred.assign(n, -1);

  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (Index s : k) {
    if (s >= n) throw InputError("source index out of range");
    f.dist[s] = 0.0;
    heap.push({0.0, s});
  }
  std::vector<bool> done(n, false);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (auto* p = m.arcs_begin(u); p != m.arcs_end(u); ++p) {
      const double nd = d + p->weight;
      if (nd < f.dist[p->to]) {
        f.dist[p->to] = nd;
        f.pred[p->to] = static_cast<std::ptrdiff_t>(u);
        heap.push({nd, p->to});
      }
    }
  }
  return f;
}

double pairwise_distance(const AgmonMetric& m, Index i, Index j) {
  if (i == j) return 0.0;
  return distance_from_set(m, {j}).dist.at(i);
}

double set_distance(const AgmonMetric& m, const IndexSet& k, const IndexSet& target) {
  if (k.empty() || target.empty()) return kInf;
  const auto f = distance_from_set(m, target);
  double best = kInf;
  for (Index i : k) best = std::min(best, f.dist.at(i));
  return best;
}

double path_length(const AgmonMetric& m, const std::vector<Index>& path) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) s += m.weight(path[k], path[k + 1]);
  return s;
}

IndexSet inner_boundary(const SparseSymMatrix& a, const IndexSet& omega) {
  const auto in = mask_of(omega, a.size());
  IndexSet out;
  for (Index k : omega) {
    for (const auto& c : a.row(k)) {
      if (!in[c.col]) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

IndexSet outer_boundary(const SparseSymMatrix& a, const IndexSet& omega) {
  const auto in = mask_of(omega, a.size());
  IndexSet out;
  for (Index k : omega) {
    for (const auto& c : a.row(k)) {
      if (!in[c.col]) out.push_back(c.col);
    }
  }
  return normalize(out);
}

double band_lower_bound(std::size_t half_bandwidth, Index i1, Index iq, double v_min, double a_max) {
  if (!(v_min > 0.0) || !(a_max > 0.0)) throw InputError("v_min and a_max must be positive");
  if (iq < i1) throw InputError("interval end precedes its start");
  if (half_bandwidth == 0) throw InputError("half bandwidth must be positive");
  const auto w = static_cast<long long>(half_bandwidth);
  const long long span = static_cast<long long>(iq - i1) + 1 - w;
  if (span < w) return 0.0;  // floor(span / w) <= 0
  const long long steps = span / w;
  return static_cast<double>(steps) * std::log1p(std::sqrt(v_min / a_max));
}

void write_distance_csv(std::ostream& out, const DistanceField& f) {
  out << "index,dist\n";
  for (std::size_t i = 0; i < f.dist.size(); ++i) out << i + 1 << ',' << csv::num(f.dist[i]) << '\n';
}

void write_edge_csv(std::ostream& out, const AgmonMetric& m) {
  out << "i,j,weight\n";
  for (const auto& e : m.edges()) out << e.i + 1 << ',' << e.j + 1 << ',' << csv::num(e.weight) << '\n';
}

}  // namespace mlandscape
