#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "mlandscape/analysis.hpp"
#include "mlandscape/csv.hpp"
#include "report_json.hpp"
#include "svg.hpp"

namespace mlandscape::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> n;
  std::optional<std::size_t> bandwidth;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> s;
  std::optional<double> floor;
  std::vector<double> ebar;
  std::vector<double> alpha;
  std::string matrix;
};

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c = f.config ? load_config(*f.config) : ExperimentConfig{};
  if (f.seed) c.ensemble.seed = *f.seed;
  if (f.out) c.out_dir = *f.out;
  if (f.n) c.ensemble.n = *f.n;
  if (f.bandwidth) c.ensemble.half_bandwidth = *f.bandwidth;
  if (f.epsilon) c.ensemble.epsilon = *f.epsilon;
  if (f.delta) c.delta = *f.delta;
  if (f.s) c.s_requested = *f.s;
  if (f.floor) c.floor = *f.floor;
  if (!f.ebar.empty()) {
    c.thresholds = f.ebar;
    c.per_eigenvalue = false;
  }
  if (!f.alpha.empty()) c.alphas = f.alpha;
  c.validate();
  return c;
}

std::size_t threads_from_env() {
  const char* s = std::getenv("MLANDSCAPE_THREADS");
  if (s == nullptr || *s == '\0') return 1;
  std::size_t n = 0;
  const char* end = s + std::char_traits<char>::length(s);
  const auto [ptr, ec] = std::from_chars(s, end, n);
  if (ec != std::errc() || ptr != end || n == 0) throw InputError("MLANDSCAPE_THREADS must be a positive integer");
  return n;
}

SparseSymMatrix load_matrix(const Flags& f, const ExperimentConfig& c) {
  if (!f.matrix.empty()) return read_matrix(f.matrix);
  return generate_band_ensemble(c.ensemble).matrix;
}

fs::path prepare(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

std::vector<double> resolve_thresholds(const ExperimentConfig& c, const SparseSymMatrix& a) {
  if (!c.per_eigenvalue) return c.thresholds;
  const Vector values = eigenvalues_sym(a);
  std::vector<double> out;
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(values.size(), static_cast<Eigen::Index>(c.n_plot)); ++j) {
    out.push_back(values(j) + c.delta);
  }
  return out;
}

/// Landscape-refined global eigenpairs, as used by every plot and scatter.
EigenDecomposition refined_eigs(const SparseSymMatrix& a, const LandscapeData& land) {
  return refine_tails(a, eig_sym(a), land.vbar);
}

// -- figure data ---------------------------------------------------------------

void landscape_figure(const fs::path& dir, const LandscapeData& land, const EigenDecomposition& ed,
                      std::size_t count) {
  count = std::min(count, ed.size());
  {
    auto out = open_out(dir / "fig_landscape.csv");
    out << "index,log10_u";
    for (std::size_t j = 0; j < count; ++j) out << ",log10_abs_psi_" << j + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < land.u.size(); ++i) {
      out << i + 1 << ',' << csv::num(std::log10(land.u(i)));
      for (std::size_t j = 0; j < count; ++j) {
        out << ',' << csv::num(std::log10(std::abs(ed.vectors(i, static_cast<Eigen::Index>(j)))));
      }
      out << '\n';
    }
  }
  const auto t = read_csv_file((dir / "fig_landscape.csv").string());
  Plot p{"Landscape and eigenvector magnitudes", "site", "log10", {}, {}, {}, {}};
  const auto x = t.values("index");
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    Series s{t.header[c], {}, c == 1 ? std::string("#000000") : palette(c - 2), false};
    for (std::size_t r = 0; r < t.rows.size(); ++r) s.points.emplace_back(x[r], t.rows[r][c]);
    p.series.push_back(std::move(s));
  }
  {
    auto file = open_out(dir / "fig_landscape.svg");
    write_svg(file, p);
  }
}

void potential_figure(const fs::path& dir, const LandscapeData& land, const EigenDecomposition& ed,
                      std::size_t count) {
  count = std::min(count, ed.size());
  const Vector inv = land.inverse_u();
  // overlay amplitude: a tenth of the range of 1/u, shared by all eigenvectors
  const double amp = 0.1 * std::max(inv.maxCoeff() - inv.minCoeff(), 1e-12);
  {
    auto out = open_out(dir / "fig_baselines.csv");
    out << "eigen_id,eigenvalue,amplitude\n";
    for (std::size_t j = 0; j < count; ++j) {
      out << j + 1 << ',' << csv::num(ed.values(static_cast<Eigen::Index>(j))) << ',' << csv::num(amp) << '\n';
    }
  }
  {
    auto out = open_out(dir / "fig_potential.csv");
    out << "index,inv_u";
    for (std::size_t j = 0; j < count; ++j) out << ",overlay_" << j + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      out << i + 1 << ',' << csv::num(inv(i));
      for (std::size_t j = 0; j < count; ++j) {
        const auto col = ed.vectors.col(static_cast<Eigen::Index>(j));
        const double peak = col.cwiseAbs().maxCoeff();
        out << ',' << csv::num(ed.values(static_cast<Eigen::Index>(j)) + amp * col(i) / peak);
      }
      out << '\n';
    }
  }
  const auto t = read_csv_file((dir / "fig_potential.csv").string());
  const auto b = read_csv_file((dir / "fig_baselines.csv").string());
  Plot p{"Effective potential 1/u with eigenvectors at their eigenvalues", "site", "energy", {}, {}, {}, {}};
  p.hlines = b.values("eigenvalue");
  const auto x = t.values("index");
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    Series s{t.header[c], {}, c == 1 ? std::string("#000000") : palette(c - 2), false};
    for (std::size_t r = 0; r < t.rows.size(); ++r) s.points.emplace_back(x[r], t.rows[r][c]);
    p.series.push_back(std::move(s));
  }
  {
    auto file = open_out(dir / "fig_potential.svg");
    write_svg(file, p);
  }
}

ScatterData scatter_files(const fs::path& dir, const SparseSymMatrix& a, const LandscapeData& land,
                          const EigenDecomposition& ed, std::size_t j, double floor) {
  const auto sd = agmon_scatter(a, land, ed, j, floor);
  {
    auto out = open_out(dir / "scatter.csv");
    out << "rho,neglog\n";
    for (const auto& [x, y] : sd.points) out << csv::num(x) << ',' << csv::num(y) << '\n';
  }
  write_json(dir / "scatter.json", to_json(sd));

  const auto t = read_csv_file((dir / "scatter.csv").string());
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : t.rows) pts.emplace_back(r[0], r[1]);
  const auto fit = fit_line(pts);
  Plot p{"-ln|psi| against Agmon distance to the maximum", "rho(i, i_max)", "-ln|psi_i|", {}, {}, {}, {}};
  p.series.push_back({"eigenvector " + std::to_string(j + 1), pts, palette(0), true});
  double xmax = 0.0;
  for (const auto& pt : pts) xmax = std::max(xmax, pt.first);
  p.series.push_back({"least squares, r = " + std::to_string(fit.pearson_r),
                      {{0.0, fit.intercept}, {xmax, fit.intercept + fit.slope * xmax}},
                      palette(1),
                      false});
  {
    auto file = open_out(dir / "scatter.svg");
    write_svg(file, p);
  }
  return sd;
}

WellPartition partition_files(const fs::path& dir, const SparseSymMatrix& a, const LandscapeData& land,
                              double threshold, double s) {
  const auto sp = shift_potential(land, threshold);
  const AgmonMetric metric(a, sp);
  const auto part = build_partition(a, metric, sp.wells, s);
  write_json(dir / "partition.json", to_json(part));

  const std::size_t n = a.size();
  std::vector<std::size_t> region(n, 0);
  for (std::size_t l = 0; l < part.regions.size(); ++l) {
    for (Index i : part.regions[l]) region[i] = l + 1;
  }
  std::vector<double> dist(n, kInf);
  for (std::size_t l = 0; l < part.wells.size(); ++l) {
    const auto field = distance_from_set(metric, part.wells[l]);
    for (Index i : part.regions[l]) dist[i] = field.dist[i];
  }
  const auto in_well = mask_of(sp.wells, n);
  {
    auto out = open_out(dir / "partition_sites.csv");
    out << "index,vbar,threshold,s,in_well,region,dist,within_s\n";
    for (Index i = 0; i < n; ++i) {
      out << i + 1 << ',' << csv::num(land.vbar(static_cast<Eigen::Index>(i))) << ',' << csv::num(threshold) << ','
          << csv::num(s) << ',' << (in_well[i] ? 1 : 0) << ',' << region[i] << ',' << csv::num(dist[i]) << ','
          << (dist[i] < s ? 1 : 0) << '\n';
    }
  }

  // rendering uses the site table only
  const auto t = read_csv_file((dir / "partition_sites.csv").string());
  const auto x = t.values("index");
  const auto vbar = t.values("vbar");
  const auto well = t.values("in_well");
  const auto reg = t.values("region");
  const auto near = t.values("within_s");
  Plot p{"Wells, S-neighborhoods and regions", "site", "effective potential", {}, {}, {}, {}};
  if (!t.rows.empty()) p.hlines.push_back(t.rows.front()[t.column("threshold")]);
  Series v{"vbar", {}, "#000000", false};
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    v.points.emplace_back(x[r], vbar[r]);
    if (near[r] != 0.0 && well[r] == 0.0) p.bands.push_back({x[r] - 0.5, x[r] + 0.5, "#9ecae1", 0.35});
    if (well[r] != 0.0) p.bands.push_back({x[r] - 0.5, x[r] + 0.5, "#fdae6b", 0.6});
    if (r > 0 && reg[r] != reg[r - 1]) p.vlines.push_back(x[r] - 0.5);
  }
  p.series.push_back(std::move(v));
  {
    auto file = open_out(dir / "partition.svg");
    write_svg(file, p);
  }
  return part;
}

// -- commands --------------------------------------------------------------------

int cmd_generate(const ExperimentConfig& c, std::ostream& out) {
  const fs::path dir = prepare(c.out_dir);
  const auto s = generate_band_ensemble(c.ensemble);
  write_matrix(s.matrix, dir / "matrix.mtx");
  const auto cls = classify(s.matrix, true);
  write_json(dir / "matrix.json", {{"seed", c.ensemble.seed},
                                   {"n", c.ensemble.n},
                                   {"half_bandwidth", c.ensemble.half_bandwidth},
                                   {"epsilon", num(c.ensemble.epsilon)},
                                   {"shift", num(s.shift)},
                                   {"lambda0", num(s.lambda0)},
                                   {"min_eigenvalue", num(*cls.min_eigenvalue)},
                                   {"connectivity", cls.connectivity},
                                   {"is_z", cls.is_z},
                                   {"is_m", *cls.is_m}});
  save_config(c, dir / "config.json");
  out << "generate: wrote " << (dir / "matrix.mtx").string() << " (n = " << c.ensemble.n
      << ", min eigenvalue = " << csv::num(*cls.min_eigenvalue) << ")\n";
  return kOk;
}

int cmd_landscape(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  const auto a = load_matrix(f, c);
  const fs::path dir = prepare(c.out_dir);
  const double thr = c.thresholds.empty() ? 0.0 : c.thresholds.front();
  const auto land = solve_landscape(a);
  const auto sp = shift_potential(land, thr);
  {
    auto file = open_out(dir / "landscape.csv");
    write_landscape_csv(file, land, sp);
  }
  write_json(dir / "landscape.json", {{"residual_inf", num(land.residual_inf)},
                                      {"u_min", num(land.u.minCoeff())},
                                      {"u_max", num(land.u.maxCoeff())},
                                      {"threshold", num(thr)},
                                      {"wells", one_based(sp.wells)}});
  out << "landscape: residual " << csv::num(land.residual_inf) << ", " << sp.wells.size() << " well sites at "
      << csv::num(thr) << '\n';
  return kOk;
}

int cmd_spectrum(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  const auto a = load_matrix(f, c);
  const fs::path dir = prepare(c.out_dir);
  const auto raw = eig_sym(a);
  const auto q = eigen_quality(a, raw);
  const auto ed = refine_tails(a, raw, solve_landscape(a).vbar);
  {
    auto file = open_out(dir / "eigenvalues.csv");
    write_eigenvalues_csv(file, ed.values);
  }
  {
    auto file = open_out(dir / "eigenvectors.csv");
    write_eigenvectors_csv(file, ed.vectors, c.n_plot);
  }
  write_json(dir / "spectrum.json", {{"quality", to_json(q)}, {"class", to_json(classify(a, false))}});
  out << "spectrum: " << ed.size() << " eigenpairs, residual " << csv::num(q.max_residual) << '\n';
  return kOk;
}

int cmd_verify(const Flags& f, const ExperimentConfig& c, std::ostream& out, const Hooks& hooks) {
  const auto a = load_matrix(f, c);
  VerifyOptions o;
  o.ebar_offsets = c.ebar_offsets;
  o.alphas = c.alphas;
  o.partition_thresholds = resolve_thresholds(c, a);
  o.s_requested = c.s_requested;
  o.delta = c.delta;
  o.threads = threads_from_env();
  o.seed = c.ensemble.seed;
  o.identity_instances = c.identity_instances;
  o.eigen_hook = hooks.eigen_hook;
  const auto b = verify_matrix(a, o);

  const fs::path dir = prepare(c.out_dir / "verify");
  auto dump = [&](const char* name, const auto& items) {
    json arr = json::array();
    for (const auto& x : items) arr.push_back(to_json(x));
    write_json(dir / name, arr);
  };
  dump("landscape_localization.json", b.landscape_localization);
  dump("general_localization.json", b.general_localization);
  dump("corollary.json", b.corollary);
  dump("identities.json", b.identities);
  dump("partitions.json", b.partitions);
  write_json(dir / "summary.json", summary_json(b));

  out << "verify: " << b.failures() << " failed checks; landscape " << b.landscape_localization.size()
      << ", general " << b.general_localization.size() << " (" << b.general_skipped_empty
      << " skipped: empty wells), corollary " << b.corollary.size() << ", identities " << b.identities.size()
      << ", partitions " << b.partitions.size() << '\n';
  return b.all_hold() ? kOk : kViolation;
}

int cmd_partition(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  const auto a = load_matrix(f, c);
  const auto thresholds = resolve_thresholds(c, a);
  if (thresholds.empty()) throw InputError("partition needs a threshold (--ebar or config thresholds)");
  const fs::path dir = prepare(c.out_dir);
  const auto part = partition_files(dir, a, solve_landscape(a), thresholds.front(), c.s_requested);
  out << "partition: " << part.regions.size() << " regions at threshold " << csv::num(thresholds.front())
      << ", S achieved " << csv::num(part.s_achieved) << ", axioms " << part.axiom_disjoint
      << part.axiom_neighborhood << part.axiom_boundary << '\n';
  return kOk;
}

int cmd_scatter(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  const auto a = load_matrix(f, c);
  if (c.scatter_eigenvector > a.size()) throw InputError("scatter_eigenvector exceeds the matrix size");
  const fs::path dir = prepare(c.out_dir);
  const auto land = solve_landscape(a);
  const auto sd = scatter_files(dir, a, land, refined_eigs(a, land), c.scatter_eigenvector - 1, c.floor);
  out << "scatter: " << sd.points.size() << " points, slope " << csv::num(sd.fitted_slope) << ", r "
      << csv::num(sd.pearson_r) << '\n';
  return kOk;
}

int cmd_figures(const Flags& f, const ExperimentConfig& c, std::ostream& out) {
  const auto a = load_matrix(f, c);
  if (c.scatter_eigenvector > a.size()) throw InputError("scatter_eigenvector exceeds the matrix size");
  const fs::path dir = prepare(c.out_dir);
  const auto land = solve_landscape(a);
  const auto ed = refined_eigs(a, land);
  {
    auto file = open_out(dir / "eigenvalues.csv");
    write_eigenvalues_csv(file, ed.values);
  }
  landscape_figure(dir, land, ed, c.n_plot);
  potential_figure(dir, land, ed, c.n_plot);
  scatter_files(dir, a, land, ed, c.scatter_eigenvector - 1, c.floor);
  auto thresholds = resolve_thresholds(c, a);
  if (thresholds.empty()) thresholds.push_back(ed.values(0) + c.delta);
  const auto part = partition_files(dir, a, land, thresholds.front(), c.s_requested);
  out << "figures: written to " << dir.string() << " (" << part.regions.size() << " regions)\n";
  return kOk;
}

int cmd_report(const ExperimentConfig& c, std::ostream& out) {
  const fs::path p = c.out_dir / "verify" / "summary.json";
  std::ifstream in(p);
  if (!in) throw InputError("no verification summary at " + p.string());
  json s;
  try {
    s = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
  auto line = [&](const char* name) {
    const json& fam = s.at(name);
    out << "  " << name << ": " << fam.at("checked") << " checked, " << fam.at("failed") << " failed\n";
  };
  out << "report for " << p.string() << '\n';
  line("landscape_localization");
  line("general_localization");
  line("corollary");
  line("identities");
  for (const auto& part : s.at("partitions")) {
    out << "  partition at " << part.at("threshold").dump() << ": " << part.at("wells") << " wells, holds "
        << part.at("holds") << ", bound " << part.at("bound").dump() << '\n';
  }
  const bool ok = s.at("all_hold").get<bool>();
  out << (ok ? "all checks hold\n" : "some checks FAILED\n");
  return ok ? kOk : kViolation;
}

void add_common(CLI::App* sub, Flags& f, bool with_matrix) {
  sub->add_option("--config", f.config, "JSON experiment configuration");
  sub->add_option("--seed", f.seed, "ensemble seed");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--n", f.n, "matrix dimension");
  sub->add_option("--bandwidth", f.bandwidth, "half-bandwidth W");
  sub->add_option("--epsilon", f.epsilon, "smallest eigenvalue after the shift");
  sub->add_option("--ebar", f.ebar, "threshold energy (repeatable)");
  sub->add_option("--delta", f.delta, "spectral gap delta");
  sub->add_option("--s", f.s, "requested separation S");
  sub->add_option("--alpha", f.alpha, "localization rate (repeatable)");
  sub->add_option("--floor", f.floor, "scatter floor for |psi|");
  if (with_matrix) sub->add_option("matrix", f.matrix, "Matrix Market file; generated from the config if omitted");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Localization landscape, Agmon distances and decoupling checks for M-matrices", "mlandscape"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<const char*, const char*>> subs{
      {"generate", "sample a random band M-matrix"},
      {"landscape", "solve Au = 1 and write u and the effective potential"},
      {"spectrum", "eigenvalues and leading eigenvectors"},
      {"verify", "run every inequality check; exit 2 on a violation"},
      {"partition", "wells, regions and separation at a threshold"},
      {"scatter", "-ln|psi| against Agmon distance"},
      {"figures", "CSV and SVG figure data"},
      {"report", "summarize a previous verify run"}};
  for (const auto& [name, help] : subs) {
    const std::string n = name;
    add_common(app.add_subcommand(name, help), f, n != "generate" && n != "report");
  }

  std::vector<std::string> argv_store{"mlandscape"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig c = resolve(f);
    if (cmd == "generate") return cmd_generate(c, out);
    if (cmd == "landscape") return cmd_landscape(f, c, out);
    if (cmd == "spectrum") return cmd_spectrum(f, c, out);
    if (cmd == "verify") return cmd_verify(f, c, out, hooks);
    if (cmd == "partition") return cmd_partition(f, c, out);
    if (cmd == "scatter") return cmd_scatter(f, c, out);
    if (cmd == "figures") return cmd_figures(f, c, out);
    return cmd_report(c, out);
  } catch (const NumericalError& e) {
    err << cmd << ": numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InputError& e) {
    err << cmd << ": " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << cmd << ": malformed JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << cmd << ": " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace mlandscape::cli
