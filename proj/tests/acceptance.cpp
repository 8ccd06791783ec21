// Acceptance driver: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Runs the full ensembles, so it is slower
// than the unit tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "mlandscape/analysis.hpp"
#include "oracles.hpp"

using namespace mlandscape;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Thread-safe failure counter that keeps the first few messages.
class Tally {
 public:
  void fail(const std::string& msg) {
    std::lock_guard lock(mu_);
    if (failures_++ < 5) first_ += (first_.empty() ? "" : "; ") + msg;
  }
  void count(std::size_t k = 1) {
    std::lock_guard lock(mu_);
    checked_ += k;
  }
  std::size_t failures() const { return failures_; }
  std::size_t checked() const { return checked_; }
  const std::string& first() const { return first_; }

 private:
  std::mutex mu_;
  std::size_t failures_ = 0;
  std::size_t checked_ = 0;
  std::string first_;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Outcome summarize(const Tally& t, const std::string& extra = {}) {
  std::string d = std::to_string(t.checked()) + " checks, " + std::to_string(t.failures()) + " failures";
  if (!extra.empty()) d += ", " + extra;
  if (t.failures() > 0) d += " [" + t.first() + "]";
  return {t.failures() == 0 && t.checked() > 0, d};
}

// -- shared ensemble of criteria 1, 2, 7, 10 ------------------------------------

const std::vector<std::size_t> kHalfBandwidths{1, 3, 10};  // W_c = 2, 6, 20
constexpr std::size_t kSeeds = 50;
constexpr std::size_t kEnsembleN = 200;

void for_each_ensemble(const std::function<void(std::size_t w, std::uint64_t seed)>& fn) {
  const std::size_t total = kHalfBandwidths.size() * kSeeds;
  parallel_for(total, worker_count(), [&](std::size_t k) { fn(kHalfBandwidths[k / kSeeds], k % kSeeds + 1); });
}

struct Prepared {
  SparseSymMatrix a;
  LandscapeData land;
  EigenDecomposition raw;
  EigenDecomposition refined;
};

Prepared prepare(std::size_t w, std::uint64_t seed, std::size_t n = kEnsembleN) {
  Prepared p;
  p.a = generate_band_ensemble({n, w, 0.1, seed}).matrix;
  p.land = solve_landscape(p.a);
  p.raw = eig_sym(p.a);
  p.refined = refine_tails(p.a, p.raw, p.land.vbar);
  return p;
}

std::string tag(std::size_t w, std::uint64_t seed) {
  return "W=" + std::to_string(w) + " seed=" + std::to_string(seed);
}

// -- criteria -------------------------------------------------------------------

Outcome landscape_sweep() {
  Tally t;
  double worst = 0.0;
  std::mutex mu;
  for_each_ensemble([&](std::size_t w, std::uint64_t seed) {
    const auto p = prepare(w, seed);
    for (std::size_t j = 0; j < p.refined.size(); ++j) {
      const auto r = check_landscape_localization(p.a, p.land, p.refined, j);
      t.count();
      {
        std::lock_guard lock(mu);
        worst = std::max(worst, r.lhs() / r.rhs);
      }
      if (!r.holds) t.fail(tag(w, seed) + " j=" + std::to_string(j + 1) + " ratio " + fmt(r.lhs() / r.rhs));
    }
  });
  return summarize(t, "worst lhs/rhs " + fmt(worst));
}

Outcome general_sweep() {
  Tally t;
  std::size_t skipped = 0;
  std::mutex mu;
  for_each_ensemble([&](std::size_t w, std::uint64_t seed) {
    const auto p = prepare(w, seed);
    const double wc = static_cast<double>(effective_connectivity(p.a));
    std::size_t local_skipped = 0;
    for (std::size_t j = 0; j < p.refined.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double e = p.refined.values(jj);
      const Vector phi = p.refined.vectors.col(jj);
      for (double offset : {0.0, 0.2}) {
        const bool empty = shift_potential(p.land, e + offset).wells.empty();
        for (double alpha : {std::sqrt(1 / wc), std::sqrt(2 / wc)}) {
          try {
            const auto r = check_general_localization(p.a, p.land.u, phi, e, e + offset, {}, alpha, j);
            t.count();
            if (empty) t.fail(tag(w, seed) + " empty well set accepted");
            if (!r.holds) t.fail(tag(w, seed) + " j=" + std::to_string(j + 1) + " alpha " + fmt(alpha));
          } catch (const InputError& ex) {
            if (!empty || std::string(ex.what()) != "empty relative well set") {
              t.fail(tag(w, seed) + " unexpected error: " + ex.what());
            }
            ++local_skipped;
          }
        }
      }
    }
    std::lock_guard lock(mu);
    skipped += local_skipped;
  });
  return summarize(t, std::to_string(skipped) + " skipped with empty wells");
}

Outcome identity_suite() {
  Tally t;
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(2, 30);
  std::normal_distribution<double> nd;
  auto vec = [&](int n, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    Vector v(n);
    for (auto& x : v) x = ud(gen);
    return v;
  };
  for (int k = 0; k < 1000; ++k) {
    const int n = size(gen);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) a(i, j) = a(j, i) = nd(gen);
    }
    const auto c = check_commutator_identity(a, vec(n, -3, 3), vec(n, -2, 2));
    const auto l = check_double_commutator_lemma(a, vec(n, -2, 2), vec(n, -3, 3), vec(n, -2, 2));
    t.count(2);
    if (!c.holds) t.fail("commutator identity instance " + std::to_string(k));
    if (!l.holds) t.fail("double commutator instance " + std::to_string(k));
  }
  for (int k = 0; k < 200; ++k) {
    const int n = size(gen);
    const Matrix z = oracle::random_z_matrix(static_cast<std::size_t>(n), 0.4, -1.0, 1.0, gen).to_dense();
    Vector u = vec(n, 0.1, 2.0);
    if (k % 2) u = -u;
    const auto c = check_commutator_identity(z, vec(n, -3, 3), u);
    t.count();
    if (!c.nonpositive || !*c.nonpositive) t.fail("non-positivity instance " + std::to_string(k));
  }
  for (int k = 0; k < 20; ++k) {
    const auto z = oracle::random_z_matrix(25, 0.3, -1.0, 1.0, gen);
    const auto ed = eig_sym(z);
    const Vector u = vec(25, 0.2, 2.0);
    for (Eigen::Index j = 0; j < 25; ++j) {
      t.count();
      if (!check_dc_corollary(z, u, ed.vectors.col(j), ed.values(j), vec(25, -2, 2)).holds) {
        t.fail("corollary matrix " + std::to_string(k) + " j=" + std::to_string(j + 1));
      }
    }
  }
  return summarize(t);
}

Outcome metric_oracle() {
  Tally t;
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<std::size_t> size(2, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int g = 0; g < 200; ++g) {
    const std::size_t n = size(gen);
    const auto a = oracle::random_z_matrix(n, 0.5, 1.0, 2.0, gen);
    ShiftedPotential sp;
    sp.v.resize(static_cast<Eigen::Index>(n));
    for (Index i = 0; i < n; ++i) sp.v(i) = unit(gen) < 0.2 ? 0.0 : 3.0 * unit(gen);
    const AgmonMetric m(a, sp);
    Matrix w = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), kInf);
    for (const auto& e : m.edges()) w(e.i, e.j) = w(e.j, e.i) = e.weight;
    IndexSet k;
    for (Index i = 0; i < n; ++i) {
      if (unit(gen) < 0.3) k.push_back(i);
    }
    if (k.empty()) k.push_back(0);
    const auto f = distance_from_set(m, k);
    for (Index i = 0; i < n; ++i) {
      const double ref = oracle::simple_path_distance(w, i, k);
      t.count();
      const bool ok = ref == kInf ? f.dist[i] == kInf : std::abs(f.dist[i] - ref) <= 1e-12;
      if (!ok) t.fail("graph " + std::to_string(g) + " node " + std::to_string(i));
    }
  }
  const auto a = generate_band_ensemble({150, 3, 0.1, 11}).matrix;
  const auto sp = shift_potential(solve_landscape(a), 1.0);
  const AgmonMetric m(a, sp);
  std::vector<DistanceField> fields;
  for (Index i = 0; i < 150; ++i) fields.push_back(distance_from_set(m, {i}));
  std::uniform_int_distribution<Index> pick(0, 149);
  for (int k = 0; k < 10000; ++k) {
    const Index i = pick(gen), j = pick(gen), l = pick(gen);
    t.count();
    const bool ok = fields[i].dist[i] == 0.0 && std::abs(fields[i].dist[j] - fields[j].dist[i]) <= 1e-12 &&
                    fields[i].dist[l] <= fields[i].dist[j] + fields[j].dist[l] + 1e-12;
    if (!ok) t.fail("triple " + std::to_string(k));
  }
  return summarize(t);
}

// Criteria 5 and 6 share the qualifying runs.
struct DecouplingSummary {
  Tally decoupling;
  Tally counting;
  std::size_t qualifying = 0;
  std::size_t multi_well = 0;
  double max_defect = 0.0;
  /// Largest defect/bound among defects above the resolution floor.
  double max_resolved_ratio = 0.0;
  std::size_t resolved = 0;
};

void block_fixtures(DecouplingSummary& s) {
  const double delta = 0.05;
  for (const auto& sizes : std::vector<std::vector<std::size_t>>{{6, 8, 5}, {10, 10}, {3, 12, 7, 9}}) {
    const auto a = oracle::block_diagonal(sizes, {2.0, 3.0, 1.5, 2.5, 4.0}, 0.7);
    const auto land = solve_landscape(a);
    const double thr = land.vbar.maxCoeff();
    const auto sp = shift_potential(land, thr);
    const auto p = build_partition(a, AgmonMetric(a, sp), sp.wells, 2.0);
    const auto ed = eig_sym(a);
    std::vector<LocalEigenData> locals;
    for (std::size_t l = 0; l < p.regions.size(); ++l) locals.push_back(local_eig(a, p.regions[l], l));
    s.decoupling.count();
    if (p.regions.size() != sizes.size() || !p.holds()) s.decoupling.fail("block partition");
    for (const auto& le : locals) {
      for (Eigen::Index j = 0; j < le.values.size(); ++j) {
        if (le.values(j) > thr - delta) continue;
        const auto r = check_decoupling_local(a, p, le, ed, static_cast<std::size_t>(j), delta, thr);
        s.decoupling.count();
        if (!(r.defect_sq <= kDefectFloor) || !r.holds) s.decoupling.fail("block local defect " + fmt(r.defect_sq));
      }
    }
    for (std::size_t j = 0; j < ed.size(); ++j) {
      if (ed.values(static_cast<Eigen::Index>(j)) > thr - delta) continue;
      const auto r = check_decoupling_global(a, p, ed, locals, j, delta, thr);
      s.decoupling.count();
      if (!(r.defect_sq <= kDefectFloor) || !r.holds) s.decoupling.fail("block global defect " + fmt(r.defect_sq));
    }
    const double lo = ed.values(0) - 1, hi = ed.values(ed.values.size() - 1) + 1;
    for (int k = 0; k <= 2000; ++k) {
      const double lambda = lo + (hi - lo) * k / 2000;
      s.counting.count();
      if (counting_global(ed, lambda) != counting_local(locals, lambda)) s.counting.fail("block N != N0");
    }
    // Both counting functions are steps, so they agree for every lambda iff
    // their jump multisets agree; the two spectra are computed separately and
    // match to roundoff, and between consecutive jumps the counts must agree.
    std::vector<double> jumps;
    for (const auto& le : locals) jumps.insert(jumps.end(), le.values.data(), le.values.data() + le.values.size());
    std::sort(jumps.begin(), jumps.end());
    s.counting.count();
    if (jumps.size() != ed.size()) s.counting.fail("block spectra differ in size");
    for (std::size_t j = 0; j < std::min(jumps.size(), ed.size()); ++j) {
      if (std::abs(jumps[j] - ed.values(static_cast<Eigen::Index>(j))) > 1e-12 * a.frobenius_norm()) {
        s.counting.fail("block jump " + std::to_string(j) + " differs");
      }
    }
    for (std::size_t j = 0; j + 1 < jumps.size(); ++j) {
      if (jumps[j + 1] - jumps[j] <= 1e-10) continue;
      const double mid = 0.5 * (jumps[j] + jumps[j + 1]);
      s.counting.count();
      if (counting_global(ed, mid) != counting_local(locals, mid)) s.counting.fail("block N != N0 between jumps");
    }
  }
}

void decoupling_runs(DecouplingSummary& s) {
  const double delta = 0.05;
  const std::size_t seeds = 6;
  std::mutex mu;
  parallel_for(seeds, worker_count(), [&](std::size_t k) {
    const std::uint64_t seed = k + 1;
    const auto p = prepare(1, seed, 1000);
    const std::size_t wc = effective_connectivity(p.a);
    const double a_max = p.a.max_abs();
    const double vmin = p.land.vbar.minCoeff();
    for (int step = 1; step <= 20; ++step) {
      const double thr = vmin + 0.05 * step;
      const auto sp = shift_potential(p.land, thr);
      const AgmonMetric m(p.a, sp);
      auto part = build_partition(p.a, m, sp.wells, 2.0);
      if (!part.holds() && part.axiom_disjoint) {
        const double s_eff = part.effective_separation();
        if (s_eff > 0.0) part = verify_separation(p.a, part.wells, part.regions, m, s_eff);
      }
      if (!part.holds()) continue;
      const double sep = part.effective_separation();
      if (!(decoupling_bound(wc, a_max, delta, sep) < 1.0)) continue;
      {
        std::lock_guard lock(mu);
        ++s.qualifying;
        if (part.wells.size() > 1) ++s.multi_well;
      }
      const std::string where = "seed=" + std::to_string(seed) + " thr=" + fmt(thr);
      std::vector<LocalEigenData> locals;
      for (std::size_t l = 0; l < part.regions.size(); ++l) {
        locals.push_back(refine_tails(p.a, local_eig(p.a, part.regions[l], l), p.land.vbar));
      }
      auto record = [&](const DecouplingReport& r, const char* dir) {
        s.decoupling.count();
        if (!r.holds || !r.spectral_step_holds) s.decoupling.fail(where + " " + dir);
        std::lock_guard lock(mu);
        s.max_defect = std::max(s.max_defect, r.defect_sq);
        if (r.defect_sq > kDefectFloor) {
          ++s.resolved;
          s.max_resolved_ratio = std::max(s.max_resolved_ratio, r.defect_sq / r.bound);
        }
      };
      for (const auto& le : locals) {
        for (Eigen::Index j = 0; j < le.values.size() && le.values(j) <= thr - delta; ++j) {
          record(check_decoupling_local(p.a, part, le, p.refined, static_cast<std::size_t>(j), delta, thr),
                 "local-to-global");
        }
      }
      for (std::size_t j = 0; j < p.refined.size() && p.refined.values(static_cast<Eigen::Index>(j)) <= thr - delta;
           ++j) {
        record(check_decoupling_global(p.a, part, p.refined, locals, j, delta, thr), "global-to-local");
      }
      const auto c = check_counting(p.refined, locals, delta, thr, sep, wc, a_max, 50);
      s.counting.count(c.points.size());
      if (!c.all_hold) s.counting.fail(where);
    }
  });
  block_fixtures(s);
}

Outcome quality_sweep() {
  Tally t;
  for_each_ensemble([&](std::size_t w, std::uint64_t seed) {
    const auto a = generate_band_ensemble({kEnsembleN, w, 0.1, seed}).matrix;
    const auto l = solve_landscape(a);
    t.count(3);
    if (!(l.u.minCoeff() > 0.0)) t.fail(tag(w, seed) + " u not positive");
    const double res = (a.multiply(l.u) - Vector::Ones(l.u.size())).cwiseAbs().maxCoeff();
    if (!(res <= 1e-10 * std::max(1.0, a.max_abs()))) t.fail(tag(w, seed) + " landscape residual " + fmt(res));
    const auto q = eigen_quality(a, eig_sym(a));
    if (!(q.max_residual <= 1e-10 * a.frobenius_norm()) || !(q.orthonormality_defect <= 1e-10)) {
      t.fail(tag(w, seed) + " eigen residual " + fmt(q.max_residual) + " orth " + fmt(q.orthonormality_defect));
    }
  });
  return summarize(t);
}

constexpr double kScatterThreshold = 0.90;

Outcome scatter_check() {
  const auto start = std::chrono::steady_clock::now();
  const auto a = generate_band_ensemble({1000, 1, 0.1, 42}).matrix;
  const auto land = solve_landscape(a);
  const auto ed = refine_tails(a, eig_sym(a), land.vbar);
  const auto s = agmon_scatter(a, land, ed, 0, 1e-17);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = std::abs(s.pearson_r) >= kScatterThreshold && secs < 60.0;
  return {ok, "r = " + fmt(s.pearson_r) + " on " + std::to_string(s.points.size()) + " points, slope " +
                  fmt(s.fitted_slope) + ", " + fmt(secs) + " s"};
}

Outcome band_bound_check() {
  Tally t;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> width(1, 5);
  for (int k = 0; k < 20; ++k) {
    const std::size_t w = width(gen);
    const std::size_t n = 80;
    const auto a = generate_band_ensemble({n, w, 0.1, 500 + static_cast<std::uint64_t>(k)}).matrix;
    const Index i1 = 15 + k % 5, iq = 55 + k % 7;
    const double v_min = 0.2 + unit(gen);
    ShiftedPotential sp;
    sp.v = Vector::Zero(static_cast<Eigen::Index>(n));
    for (Index i = i1; i <= iq; ++i) sp.v(i) = v_min + 2.0 * unit(gen);
    sp.v(i1) = v_min;
    double a_max = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (const auto& c : a.row(i)) a_max = std::max(a_max, std::abs(c.value));
    }
    const AgmonMetric m(a, sp);
    IndexSet left, right;
    for (Index i = 0; i < i1; ++i) left.push_back(i);
    for (Index i = iq + 1; i < n; ++i) right.push_back(i);
    const double rho = set_distance(m, left, right);
    const double bound = band_lower_bound(w, i1, iq, v_min, a_max);
    t.count();
    if (!(rho >= bound) || !(bound > 0.0)) {
      t.fail("instance " + std::to_string(k) + " rho " + fmt(rho) + " bound " + fmt(bound));
    }
  }
  return summarize(t);
}

Outcome ensemble_contract() {
  Tally t;
  for_each_ensemble([&](std::size_t w, std::uint64_t seed) {
    const auto a = generate_band_ensemble({kEnsembleN, w, 0.1, seed}).matrix;
    const auto c = classify(a, true);
    t.count();
    const bool ok = c.is_z && c.connectivity <= 2 * w && c.min_eigenvalue &&
                    std::abs(*c.min_eigenvalue - 0.1) <= 1e-8 && c.is_m.value_or(false);
    if (!ok) t.fail(tag(w, seed));
  });
  return summarize(t);
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail << " ["
              << fmt(secs) << " s]" << std::endl;
  };

  report(1, "landscape localization sweep", landscape_sweep);
  report(2, "general localization sweep", general_sweep);
  report(3, "identity suite", identity_suite);
  report(4, "metric oracle", metric_oracle);

  DecouplingSummary dec;
  std::string dec_error;
  const auto start = std::chrono::steady_clock::now();
  try {
    decoupling_runs(dec);
  } catch (const std::exception& e) {
    dec_error = e.what();
  }
  const double dec_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(5, "decoupling", [&]() -> Outcome {
    if (!dec_error.empty()) return {false, "exception: " + dec_error};
    auto o = summarize(dec.decoupling, std::to_string(dec.qualifying) + " qualifying runs (" +
                                           std::to_string(dec.multi_well) + " with several wells), max defect_sq " +
                                           fmt(dec.max_defect) + ", " + std::to_string(dec.resolved) +
                                           " defects above the 1e-20 floor (max defect/bound " +
                                           fmt(dec.max_resolved_ratio) + "), " + fmt(dec_secs) + " s shared with 6");
    o.pass = o.pass && dec.qualifying > 0;
    return o;
  });
  report(6, "counting", [&]() -> Outcome {
    if (!dec_error.empty()) return {false, "exception: " + dec_error};
    auto o = summarize(dec.counting);
    o.pass = o.pass && dec.qualifying > 0;
    return o;
  });

  report(7, "landscape and eigensolver quality", quality_sweep);
  report(8, "scatter correlation", scatter_check);
  report(9, "band lower bound", band_bound_check);
  report(10, "ensemble contract", ensemble_contract);

  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
