#include "mlandscape/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "mlandscape/rng.hpp"

namespace mlandscape {

namespace {

bool within(double lhs, double rhs) { return lhs <= rhs + kRelSlack * std::abs(rhs); }

/// sum over k outside `wells` with x_k != 0 of exp(2 alpha rho_k) x_k^2 w_k,
/// evaluated in log space. Terms with x_k == 0 contribute nothing even when
/// rho_k is infinite.
double weighted_tail_sum(const Vector& x, const std::vector<double>& rho, const std::vector<bool>& in_wells,
                         double alpha, const Vector* weight) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (in_wells[k] || x(k) == 0.0) continue;
    const double w = weight ? (*weight)(k) : 1.0;
    if (w == 0.0) continue;
    s += std::exp(2.0 * alpha * rho[k] + 2.0 * std::log(std::abs(x(k)))) * w;
  }
  return s;
}

LinearFit least_squares(const std::vector<std::pair<double, double>>& pts) {
  LinearFit f;
  const double n = static_cast<double>(pts.size());
  if (pts.size() < 2) return f;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx > 0.0) {
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
  }
  if (sxx > 0.0 && syy > 0.0) f.pearson_r = sxy / std::sqrt(sxx * syy);
  return f;
}

Matrix diag_of(const Vector& d) { return d.asDiagonal(); }

double quad(const Matrix& m, const Vector& x, const Vector& y) { return x.dot(m * y); }

Matrix double_commutator(const Matrix& a, const Matrix& d) {
  const Matrix c = a * d - d * a;
  return c * d - d * c;
}

}  // namespace

std::size_t effective_connectivity(const SparseSymMatrix& a) {
  return std::max<std::size_t>(2, connectivity(a));
}

// -- localization -------------------------------------------------------------

LocalizationReport check_landscape_localization(const SparseSymMatrix& a, const LandscapeData& l,
                                                const EigenDecomposition& ed, std::size_t j) {
  if (j >= ed.size()) throw InputError("eigen index out of range");
  const auto wc = static_cast<double>(effective_connectivity(a));
  const double energy = ed.values(static_cast<Eigen::Index>(j));
  const Vector psi = ed.vectors.col(static_cast<Eigen::Index>(j));

  // 1/u is two roundings away from the matrix entries, so a site whose exact
  // potential equals E can land a few ulps above it; such sites belong to the well.
  Vector potential = l.inverse_u();
  for (auto& p : potential) {
    if (std::abs(p - energy) <= 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(p), std::abs(energy))) {
      p = energy;
    }
  }
  const auto sp = shift_potential(potential, energy);
  const AgmonMetric metric(a, sp);
  const auto field = distance_from_set(metric, sp.wells);

  LocalizationReport r;
  r.eigen_id = j;
  r.energy = energy;
  r.threshold = energy;
  r.alpha = 1.0 / std::sqrt(wc);
  r.lhs_first = 0.0;
  r.lhs_second = weighted_tail_sum(psi, field.dist, mask_of(sp.wells, a.size()), r.alpha, &sp.v);
  r.rhs = wc * a.max_abs();
  r.holds = within(r.lhs(), r.rhs);
  r.max_margin = r.rhs - r.lhs();
  return r;
}

LocalizationReport check_general_localization(const SparseSymMatrix& a, const Vector& u, const Vector& phi,
                                              double energy, double threshold, const IndexSet& excluded,
                                              double alpha, std::size_t eigen_id) {
  const auto wc = static_cast<double>(effective_connectivity(a));
  const double alpha_max = std::sqrt(2.0 / wc);
  if (!(alpha > 0.0) || alpha > alpha_max * (1.0 + 1e-15)) {
    throw InputError("alpha must lie in (0, sqrt(2/W_c)]");
  }
  if (energy > threshold) throw InputError("eigenvalue exceeds the threshold");

  const auto land = landscape_from_vector(a, u);
  const auto sp = shift_potential(land, threshold);
  const IndexSet target = set_difference(sp.wells, excluded);
  if (target.empty()) throw InputError("empty relative well set");

  const AgmonMetric metric(a, sp);
  const auto field = distance_from_set(metric, target);
  const auto in_wells = mask_of(sp.wells, a.size());

  LocalizationReport r;
  r.eigen_id = eigen_id;
  r.energy = energy;
  r.threshold = threshold;
  r.alpha = alpha;
  r.excluded = excluded;

  const double gap = threshold - energy;
  if (gap > 0.0) r.lhs_first = gap * weighted_tail_sum(phi, field.dist, in_wells, alpha, nullptr);
  double coeff = 1.0 - alpha * alpha * wc / 2.0;
  if (coeff < 1e-12) coeff = 0.0;  // alpha at its upper limit
  if (coeff > 0.0) r.lhs_second = coeff * weighted_tail_sum(phi, field.dist, in_wells, alpha, &sp.v);

  const auto in_target = mask_of(target, a.size());
  double coupling = 0.0;
  for (Index i : target) {
    for (const auto& c : a.row(i)) {
      if (!in_target[c.col]) coupling = std::max(coupling, std::abs(c.value));
    }
  }
  r.rhs = wc / 2.0 * phi.squaredNorm() * coupling;
  r.holds = within(r.lhs(), r.rhs);
  r.max_margin = r.rhs - r.lhs();
  return r;
}

// -- commutator identities ----------------------------------------------------

IdentityCheck check_commutator_identity(const Matrix& a, const Vector& d, const Vector& u) {
  const Eigen::Index n = a.rows();
  IdentityCheck c;
  c.lhs = quad(double_commutator(a, diag_of(d)), u, u);

  double rhs = 0.0, scale = 0.0;
  bool is_z = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dd = (d(i) - d(j)) * (d(i) - d(j));
      rhs += a(i, j) * u(i) * u(j) * dd;
      scale += std::abs(a(i, j) * u(i) * u(j)) * dd;
      if (a(i, j) > 0.0) is_z = false;
    }
  }
  c.rhs = rhs;
  c.max_abs_diff = std::abs(c.lhs - c.rhs);
  c.holds = c.max_abs_diff <= kIdentityTol * (1.0 + std::abs(c.lhs));

  const bool constant_sign = (u.array() >= 0.0).all() || (u.array() <= 0.0).all();
  if (is_z && constant_sign) c.nonpositive = c.lhs <= 1e-12 * (1.0 + scale);
  return c;
}

IdentityCheck check_double_commutator_lemma(const Matrix& a, const Vector& psi, const Vector& g,
                                            const Vector& u) {
  const Matrix p = diag_of(psi);
  const Matrix gm = diag_of(g);
  const Matrix gp = gm * p;

  IdentityCheck c;
  const Vector left = gm * ((p * a - a * p) * u);
  c.lhs = left.dot(gp * u);
  const Vector pu = p * u;
  c.rhs = 0.5 * quad(double_commutator(a, gp), u, u) - 0.5 * quad(double_commutator(a, gm), pu, pu);
  c.max_abs_diff = std::abs(c.lhs - c.rhs);
  c.holds = c.max_abs_diff <= kIdentityTol * (1.0 + std::abs(c.lhs) + std::abs(c.rhs));
  return c;
}

InequalityCheck check_dc_corollary(const SparseSymMatrix& a, const Vector& u, const Vector& phi, double energy,
                                   const Vector& g) {
  if ((u.array() <= 0.0).any()) throw InputError("landscape vector must be strictly positive");
  const Vector au = a.multiply(u);
  InequalityCheck c;
  double scale = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const double vbar = au(k) / u(k);
    const double w = phi(k) * phi(k) * g(k) * g(k);
    c.lhs += w * (vbar - energy);
    scale += w * (std::abs(vbar) + std::abs(energy));
  }
  double rhs = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    for (const auto& e : a.row(i)) {
      const double dg = g(i) - g(e.col);
      rhs += e.value * phi(i) * phi(e.col) * dg * dg;
      scale += std::abs(e.value * phi(i) * phi(e.col)) * dg * dg;
    }
  }
  c.rhs = -0.5 * rhs;
  c.holds = c.lhs <= c.rhs + kRelSlack * std::abs(c.rhs) + 1e-12 * (1.0 + scale);
  return c;
}

// -- decoupling ---------------------------------------------------------------

double decoupling_bound(std::size_t wc, double a_max, double delta, double separation, double norm_sq) {
  if (separation == kInf) return 0.0;
  const auto w = static_cast<double>(wc);
  const double log_bound = 2.0 * std::log(w) - 3.0 * std::log(delta) + 3.0 * std::log(a_max) -
                           2.0 * separation / std::sqrt(w);
  return std::exp(log_bound) * norm_sq;
}

namespace {

void require_partition(const WellPartition& p, double threshold) {
  if (!p.holds()) throw InputError("partition axioms unverified");
  if (p.threshold != threshold) throw InputError("partition was built at a different threshold");
}

void finish(DecouplingReport& r, double norm_sq) {
  const double floor = kDefectFloor * norm_sq;
  r.spectral_step_holds =
      r.residual_norm_sq + floor >= r.delta * r.delta * r.defect_sq * (1.0 - kRelSlack);
  r.holds = r.spectral_step_holds && r.defect_sq <= r.bound * (1.0 + kRelSlack) + floor;
}

}  // namespace

DecouplingReport check_decoupling_local(const SparseSymMatrix& a, const WellPartition& partition,
                                        const LocalEigenData& local, const EigenDecomposition& ed,
                                        std::size_t j, double delta, double threshold) {
  require_partition(partition, threshold);
  if (j >= static_cast<std::size_t>(local.values.size())) throw InputError("local eigen index out of range");
  const double mu = local.values(static_cast<Eigen::Index>(j));
  if (mu > threshold - delta) throw InputError("local eigenvalue above Ebar - delta");

  const Vector phi = local.vectors.col(static_cast<Eigen::Index>(j));
  DecouplingReport r;
  r.direction = DecouplingDirection::local_to_global;
  r.region_id = local.region_id;
  r.eigen_id = j;
  r.eigenvalue = mu;
  r.delta = delta;
  r.separation = partition.effective_separation();

  const auto proj = global_projector(ed, mu - delta, mu + delta);
  r.defect_sq = (phi - project(proj, phi)).squaredNorm();
  r.residual_norm_sq = (a.multiply(phi) - mu * phi).squaredNorm();
  r.bound = decoupling_bound(effective_connectivity(a), a.max_abs(), delta, r.separation, phi.squaredNorm());
  finish(r, phi.squaredNorm());
  return r;
}

DecouplingReport check_decoupling_global(const SparseSymMatrix& a, const WellPartition& partition,
                                         const EigenDecomposition& ed, std::span<const LocalEigenData> locals,
                                         std::size_t j, double delta, double threshold) {
  require_partition(partition, threshold);
  if (j >= ed.size()) throw InputError("eigen index out of range");
  const double lambda = ed.values(static_cast<Eigen::Index>(j));
  if (lambda > threshold - delta) throw InputError("eigenvalue above Ebar - delta");

  const Vector psi = ed.vectors.col(static_cast<Eigen::Index>(j));
  DecouplingReport r;
  r.direction = DecouplingDirection::global_to_local;
  r.eigen_id = j;
  r.eigenvalue = lambda;
  r.delta = delta;
  r.separation = partition.effective_separation();

  const auto proj = local_projector(locals, lambda - delta, lambda + delta);
  r.defect_sq = (psi - project(proj, psi)).squaredNorm();

  // r~ = sum_l (A|_Omega_l - lambda I) psi|_Omega_l
  Vector rt = Vector::Zero(psi.size());
  for (const auto& region : partition.regions) {
    const auto in = mask_of(region, a.size());
    for (Index i : region) {
      double s = a.diag(i) * psi(i) - lambda * psi(i);
      for (const auto& c : a.row(i)) {
        if (in[c.col]) s += c.value * psi(c.col);
      }
      rt(i) += s;
    }
  }
  r.residual_norm_sq = rt.squaredNorm();
  r.bound = decoupling_bound(effective_connectivity(a), a.max_abs(), delta, r.separation, psi.squaredNorm());
  finish(r, psi.squaredNorm());
  return r;
}

// -- counting -----------------------------------------------------------------

std::size_t counting_nbar(std::size_t wc, double a_max, double delta, double separation, std::size_t cap,
                          bool* saturated) {
  // Nbar < exp(2S/sqrt(W_c)) / factor, i.e. Nbar = ceil(x) - 1
  const double x = 1.0 / decoupling_bound(wc, a_max, delta, separation);
  std::size_t nbar = cap;
  bool sat = true;
  if (x <= static_cast<double>(cap)) {
    nbar = static_cast<std::size_t>(std::ceil(x)) - 1;
    sat = false;
  }
  if (saturated) *saturated = sat;
  return nbar;
}

CountingReport check_counting(const EigenDecomposition& ed, std::span<const LocalEigenData> locals,
                              double delta, double threshold, double separation, std::size_t wc, double a_max,
                              std::size_t grid_points) {
  CountingReport r;
  r.delta = delta;
  r.threshold = threshold;
  r.separation = separation;
  std::size_t local_total = 0;
  double lo = ed.size() ? ed.values(0) : threshold;
  for (const auto& l : locals) {
    local_total += static_cast<std::size_t>(l.values.size());
    if (l.values.size()) lo = std::min(lo, l.values(0));
  }
  const std::size_t cap = std::max(ed.size(), local_total) + 1;
  r.nbar = counting_nbar(wc, a_max, delta, separation, cap, &r.nbar_saturated);

  lo -= delta;
  r.all_hold = true;
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double t = grid_points > 1 ? static_cast<double>(g) / static_cast<double>(grid_points - 1) : 1.0;
    CountingPoint p;
    p.mu = g + 1 == grid_points ? threshold : lo + t * (threshold - lo);
    p.global_at_mu = counting_global(ed, p.mu);
    p.local_at_mu = counting_local(locals, p.mu);
    p.global_below = counting_global(ed, p.mu - delta);
    p.local_below = counting_local(locals, p.mu - delta);
    p.first_holds = std::min(r.nbar, p.local_below) <= p.global_at_mu;
    p.second_holds = std::min(r.nbar, p.global_below) <= p.local_at_mu;
    r.all_hold = r.all_hold && p.first_holds && p.second_holds;
    r.points.push_back(p);
  }
  return r;
}

// -- scatter ------------------------------------------------------------------

LinearFit fit_line(const std::vector<std::pair<double, double>>& points) { return least_squares(points); }

ScatterData agmon_scatter(const SparseSymMatrix& a, const LandscapeData& l, const EigenDecomposition& ed,
                          std::size_t j, double floor) {
  if (j >= ed.size()) throw InputError("eigen index out of range");
  ScatterData s;
  s.eigen_id = j;
  s.floor = floor;
  s.energy = ed.values(static_cast<Eigen::Index>(j));
  const Vector psi = ed.vectors.col(static_cast<Eigen::Index>(j));

  double best = -1.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (std::abs(psi(i)) > best) {
      best = std::abs(psi(i));
      s.i_max = static_cast<Index>(i);
    }
  }
  const AgmonMetric metric(a, shift_potential(l.inverse_u(), s.energy));
  const auto field = distance_from_set(metric, {s.i_max});
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double mag = std::abs(psi(i));
    if (mag > floor && std::isfinite(field.dist[i])) s.points.emplace_back(field.dist[i], -std::log(mag));
  }
  const auto fit = least_squares(s.points);
  s.fitted_slope = fit.slope;
  s.intercept = fit.intercept;
  s.pearson_r = fit.pearson_r;
  return s;
}

// -- sweeps -------------------------------------------------------------------

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t VerificationBundle::failures() const {
  std::size_t f = 0;
  for (const auto& r : landscape_localization) f += !r.holds;
  for (const auto& r : general_localization) f += !r.holds;
  for (const auto& c : corollary) f += !c.holds;
  for (const auto& c : identities) f += !c.holds + (c.nonpositive.has_value() && !*c.nonpositive);
  for (const auto& p : partitions) {
    for (const auto& r : p.local_localization) f += !r.holds;
    for (const auto& r : p.local_to_global) f += !r.holds + !r.spectral_step_holds;
    for (const auto& r : p.global_to_local) f += !r.holds + !r.spectral_step_holds;
    if (p.counting) f += !p.counting->all_hold;
  }
  return f;
}

VerificationBundle verify_matrix(const SparseSymMatrix& a, const VerifyOptions& opts) {
  VerificationBundle b;
  b.matrix_class = classify(a, true);
  if (!b.matrix_class.is_m.value_or(false)) throw InputError("matrix is not a non-singular M-matrix");
  b.wc = effective_connectivity(a);
  b.a_max = a.max_abs();
  const double wc = static_cast<double>(b.wc);

  const auto land = solve_landscape(a);
  b.landscape_residual = land.residual_inf;
  auto ed = eig_sym(a);
  b.eigen_quality = eigen_quality(a, ed);
  if (opts.refine_tails) ed = refine_tails(a, ed, land.vbar, opts.tail_ratio);
  if (opts.eigen_hook) opts.eigen_hook(ed);

  const std::size_t n = ed.size();
  b.landscape_localization.resize(n);
  parallel_for(n, opts.threads, [&](std::size_t j) {
    b.landscape_localization[j] = check_landscape_localization(a, land, ed, j);
  });

  const std::vector<double> alphas =
      opts.alphas.empty() ? std::vector<double>{std::sqrt(1.0 / wc), std::sqrt(2.0 / wc)} : opts.alphas;
  const std::size_t per = opts.ebar_offsets.size() * alphas.size();
  std::vector<std::optional<LocalizationReport>> general(n * per);
  parallel_for(n, opts.threads, [&](std::size_t j) {
    const double e = ed.values(static_cast<Eigen::Index>(j));
    std::size_t slot = j * per;
    for (double off : opts.ebar_offsets) {
      for (double alpha : alphas) {
        try {
          general[slot] = check_general_localization(a, land.u, ed.vectors.col(static_cast<Eigen::Index>(j)), e,
                                                     e + off, {}, alpha, j);
        } catch (const InputError& err) {
          if (std::string(err.what()) != "empty relative well set") throw;
        }
        ++slot;
      }
    }
  });
  for (auto& g : general) {
    if (g) {
      b.general_localization.push_back(std::move(*g));
    } else {
      ++b.general_skipped_empty;
    }
  }

  // corollary with G = 1 and with the exponential weight used in its proof
  b.corollary.resize(2 * n);
  parallel_for(n, opts.threads, [&](std::size_t j) {
    const double e = ed.values(static_cast<Eigen::Index>(j));
    const Vector phi = ed.vectors.col(static_cast<Eigen::Index>(j));
    b.corollary[2 * j] = check_dc_corollary(a, land.u, phi, e, Vector::Ones(phi.size()));
    const auto sp = shift_potential(land, e);
    const auto field = distance_from_set(AgmonMetric(a, sp), sp.wells);
    Vector g(phi.size());
    const auto in = mask_of(sp.wells, a.size());
    for (Index k = 0; k < a.size(); ++k) {
      g(k) = in[k] ? 0.0 : std::exp(std::min(700.0, field.dist[k] / std::sqrt(wc)));
    }
    b.corollary[2 * j + 1] = check_dc_corollary(a, land.u, phi, e, g);
  });

  // randomized identity instances on this matrix
  {
    const Matrix dense = a.to_dense();
    NormalStream rng(opts.seed, 0x1d);
    for (std::size_t t = 0; t < opts.identity_instances; ++t) {
      Vector d(dense.rows()), u(dense.rows()), g(dense.rows()), psi(dense.rows());
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        d(i) = rng.normal();
        u(i) = std::abs(rng.normal()) + 0.1;
        g(i) = rng.normal();
        psi(i) = rng.normal();
      }
      b.identities.push_back(check_commutator_identity(dense, d, u));
      b.identities.push_back(check_double_commutator_lemma(dense, psi, g, u));
    }
  }

  for (double ebar : opts.partition_thresholds) {
    PartitionRun run;
    run.threshold = ebar;
    const auto sp = shift_potential(land, ebar);
    const AgmonMetric metric(a, sp);
    run.partition = build_partition(a, metric, sp.wells, opts.s_requested);
    // fall back to the separation the constructed sets actually achieve
    const double s_eff = run.partition.effective_separation();
    if (!run.partition.holds() && run.partition.axiom_disjoint && s_eff > 0.0 && s_eff < kInf) {
      auto unreachable = std::move(run.partition.unreachable);
      run.partition = verify_separation(a, run.partition.wells, run.partition.regions, metric, s_eff);
      run.partition.unreachable = std::move(unreachable);
      run.relaxed = true;
    }
    if (sp.wells.empty() || !run.partition.holds()) {
      b.partitions.push_back(std::move(run));
      continue;
    }
    run.separation = run.partition.effective_separation();
    run.bound = decoupling_bound(b.wc, b.a_max, opts.delta, run.separation);

    std::vector<LocalEigenData> locals;
    for (std::size_t l = 0; l < run.partition.regions.size(); ++l) {
      auto le = local_eig(a, run.partition.regions[l], l);
      if (opts.refine_tails) le = refine_tails(a, le, land.vbar, opts.tail_ratio);
      locals.push_back(std::move(le));
    }

    for (const auto& le : locals) {
      const IndexSet outside = complement(le.domain, a.size());
      for (Eigen::Index j = 0; j < le.values.size(); ++j) {
        const double mu = le.values(j);
        if (mu <= ebar) {
          for (double alpha : alphas) {
            run.local_localization.push_back(check_general_localization(
                a, land.u, le.vectors.col(j), mu, ebar, outside, alpha, static_cast<std::size_t>(j)));
          }
        }
        if (mu <= ebar - opts.delta) {
          run.local_to_global.push_back(
              check_decoupling_local(a, run.partition, le, ed, static_cast<std::size_t>(j), opts.delta, ebar));
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (ed.values(static_cast<Eigen::Index>(j)) <= ebar - opts.delta) {
        run.global_to_local.push_back(check_decoupling_global(a, run.partition, ed, locals, j, opts.delta, ebar));
      }
    }
    run.counting = check_counting(ed, locals, opts.delta, ebar, run.separation, b.wc, b.a_max,
                                  opts.counting_grid);
    b.partitions.push_back(std::move(run));
  }
  return b;
}

}  // namespace mlandscape
