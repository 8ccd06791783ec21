#include "report_json.hpp"

#include <cmath>

namespace mlandscape::cli {

using nlohmann::json;

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json one_based(const IndexSet& s) {
  json out = json::array();
  for (Index i : s) out.push_back(i + 1);
  return out;
}

namespace {

json nums(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(num(x));
  return out;
}

const char* direction_name(DecouplingDirection d) {
  return d == DecouplingDirection::local_to_global ? "local_to_global" : "global_to_local";
}

}  // namespace

json to_json(const MatrixClass& c) {
  json j{{"is_z", c.is_z}, {"connectivity", c.connectivity}, {"near_singular", c.near_singular}};
  j["is_m"] = c.is_m ? json(*c.is_m) : json(nullptr);
  j["min_eigenvalue"] = c.min_eigenvalue ? num(*c.min_eigenvalue) : json(nullptr);
  return j;
}

json to_json(const EigenQuality& q) {
  return {{"max_residual", num(q.max_residual)}, {"orthonormality_defect", num(q.orthonormality_defect)}};
}

json to_json(const LocalizationReport& r) {
  return {{"eigen_id", r.eigen_id + 1},
          {"energy", num(r.energy)},
          {"threshold", num(r.threshold)},
          {"alpha", num(r.alpha)},
          {"excluded_count", r.excluded.size()},
          {"lhs_first", num(r.lhs_first)},
          {"lhs_second", num(r.lhs_second)},
          {"lhs", num(r.lhs())},
          {"rhs", num(r.rhs)},
          {"max_margin", num(r.max_margin)},
          {"holds", r.holds}};
}

json to_json(const DecouplingReport& r) {
  return {{"direction", direction_name(r.direction)},
          {"region_id", r.region_id + 1},
          {"eigen_id", r.eigen_id + 1},
          {"eigenvalue", num(r.eigenvalue)},
          {"delta", num(r.delta)},
          {"separation", num(r.separation)},
          {"residual_norm_sq", num(r.residual_norm_sq)},
          {"defect_sq", num(r.defect_sq)},
          {"bound", num(r.bound)},
          {"spectral_step_holds", r.spectral_step_holds},
          {"holds", r.holds}};
}

json to_json(const CountingReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"mu", num(p.mu)},
                   {"global_at_mu", p.global_at_mu},
                   {"local_at_mu", p.local_at_mu},
                   {"global_below", p.global_below},
                   {"local_below", p.local_below},
                   {"first_holds", p.first_holds},
                   {"second_holds", p.second_holds}});
  }
  return {{"delta", num(r.delta)},
          {"threshold", num(r.threshold)},
          {"separation", num(r.separation)},
          {"nbar", r.nbar},
          {"nbar_saturated", r.nbar_saturated},
          {"points", pts},
          {"all_hold", r.all_hold}};
}

json to_json(const ScatterData& s) {
  return {{"eigen_id", s.eigen_id + 1},
          {"energy", num(s.energy)},
          {"i_max", s.i_max + 1},
          {"floor", num(s.floor)},
          {"points", s.points.size()},
          {"fitted_slope", num(s.fitted_slope)},
          {"intercept", num(s.intercept)},
          {"pearson_r", num(s.pearson_r)}};
}

json to_json(const IdentityCheck& c) {
  json j{{"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"max_abs_diff", num(c.max_abs_diff)}, {"holds", c.holds}};
  j["nonpositive"] = c.nonpositive ? json(*c.nonpositive) : json(nullptr);
  return j;
}

json to_json(const InequalityCheck& c) { return {{"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}, {"holds", c.holds}}; }

json to_json(const WellPartition& p) {
  json wells = json::array();
  json regions = json::array();
  for (const auto& k : p.wells) wells.push_back(one_based(k));
  for (const auto& r : p.regions) regions.push_back(one_based(r));
  return {{"threshold", num(p.threshold)},
          {"wells", wells},
          {"regions", regions},
          {"s_requested", num(p.s_requested)},
          {"s_achieved", num(p.s_achieved)},
          {"effective_separation", num(p.effective_separation())},
          {"well_separation", num(p.well_separation)},
          {"axioms", {{"disjoint", p.axiom_disjoint}, {"neighborhood", p.axiom_neighborhood},
                      {"boundary", p.axiom_boundary}}},
          {"boundary_distance", nums(p.boundary_distance)},
          {"exterior_distance", nums(p.exterior_distance)},
          {"unreachable", one_based(p.unreachable)},
          {"holds", p.holds()}};
}

json to_json(const PartitionRun& r) {
  json j{{"threshold", num(r.threshold)},
         {"partition", to_json(r.partition)},
         {"relaxed", r.relaxed},
         {"separation", num(r.separation)},
         {"bound", num(r.bound)}};
  json loc = json::array();
  for (const auto& x : r.local_localization) loc.push_back(to_json(x));
  json l2g = json::array();
  for (const auto& x : r.local_to_global) l2g.push_back(to_json(x));
  json g2l = json::array();
  for (const auto& x : r.global_to_local) g2l.push_back(to_json(x));
  j["local_localization"] = loc;
  j["local_to_global"] = l2g;
  j["global_to_local"] = g2l;
  j["counting"] = r.counting ? to_json(*r.counting) : json(nullptr);
  return j;
}

namespace {

template <class Range, class Pred>
json family(const Range& items, Pred failed) {
  std::size_t f = 0;
  for (const auto& x : items) f += failed(x) ? 1 : 0;
  return {{"checked", items.size()}, {"failed", f}};
}

}  // namespace

json summary_json(const VerificationBundle& b) {
  json j;
  j["matrix_class"] = to_json(b.matrix_class);
  j["wc"] = b.wc;
  j["a_max"] = num(b.a_max);
  j["landscape_residual"] = num(b.landscape_residual);
  j["eigen_quality"] = to_json(b.eigen_quality);
  auto fails = [](const auto& r) { return !r.holds; };
  j["landscape_localization"] = family(b.landscape_localization, fails);
  j["general_localization"] = family(b.general_localization, fails);
  j["general_localization"]["skipped_empty_wells"] = b.general_skipped_empty;
  j["corollary"] = family(b.corollary, fails);
  j["identities"] = family(b.identities, [](const IdentityCheck& c) {
    return !c.holds || (c.nonpositive.has_value() && !*c.nonpositive);
  });
  json parts = json::array();
  for (const auto& p : b.partitions) {
    auto dfail = [](const DecouplingReport& r) { return !r.holds || !r.spectral_step_holds; };
    parts.push_back({{"threshold", num(p.threshold)},
                     {"wells", p.partition.wells.size()},
                     {"holds", p.partition.holds()},
                     {"relaxed", p.relaxed},
                     {"separation", num(p.separation)},
                     {"bound", num(p.bound)},
                     {"local_localization", family(p.local_localization, fails)},
                     {"local_to_global", family(p.local_to_global, dfail)},
                     {"global_to_local", family(p.global_to_local, dfail)},
                     {"counting_holds", p.counting ? json(p.counting->all_hold) : json(nullptr)}});
  }
  j["partitions"] = parts;
  j["failures"] = b.failures();
  j["all_hold"] = b.all_hold();
  return j;
}

}  // namespace mlandscape::cli
