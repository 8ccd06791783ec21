#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace mlandscape::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InputError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config: wrong type for '") + key + "'");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  ensemble.validate();
  if (!(s_requested > 0.0)) throw InputError("config: s must be positive");
  if (!(delta > 0.0)) throw InputError("config: delta must be positive");
  if (!(floor > 0.0)) throw InputError("config: floor must be positive");
  if (n_plot == 0) throw InputError("config: n_eigenvectors_to_plot must be positive");
  if (scatter_eigenvector == 0) {
    throw InputError("config: scatter_eigenvector is 1-based");
  }
  for (double a : alphas) {
    if (!(a > 0.0)) throw InputError("config: alphas must be positive");
  }
  for (double t : thresholds) {
    if (!std::isfinite(t)) throw InputError("config: thresholds must be finite");
  }
  for (double o : ebar_offsets) {
    if (!(o >= 0.0)) throw InputError("config: ebar_offsets must be non-negative");
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["ensemble"] = {{"n", c.ensemble.n},
                   {"half_bandwidth", c.ensemble.half_bandwidth},
                   {"epsilon", c.ensemble.epsilon},
                   {"seed", c.ensemble.seed}};
  if (c.per_eigenvalue) {
    j["thresholds"] = "per-eigenvalue";
  } else {
    j["thresholds"] = c.thresholds;
  }
  j["s"] = c.s_requested;
  j["delta"] = c.delta;
  j["alphas"] = c.alphas;
  j["ebar_offsets"] = c.ebar_offsets;
  j["n_eigenvectors_to_plot"] = c.n_plot;
  j["scatter_eigenvector"] = c.scatter_eigenvector;
  j["floor"] = c.floor;
  j["identity_instances"] = c.identity_instances;
  j["out"] = c.out_dir.string();
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  check_keys(j,
             {"ensemble", "thresholds", "s", "delta", "alphas", "ebar_offsets", "n_eigenvectors_to_plot",
              "scatter_eigenvector", "floor", "identity_instances", "out"},
             "config");
  ExperimentConfig c;
  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    check_keys(e, {"n", "half_bandwidth", "epsilon", "seed"}, "config.ensemble");
    read(e, "n", c.ensemble.n);
    read(e, "half_bandwidth", c.ensemble.half_bandwidth);
    read(e, "epsilon", c.ensemble.epsilon);
    read(e, "seed", c.ensemble.seed);
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    if (t.is_string()) {
      if (t.get<std::string>() != "per-eigenvalue") {
        throw InputError("config: thresholds must be a list or \"per-eigenvalue\"");
      }
      c.per_eigenvalue = true;
    } else {
      read(j, "thresholds", c.thresholds);
    }
  }
  read(j, "s", c.s_requested);
  read(j, "delta", c.delta);
  read(j, "alphas", c.alphas);
  read(j, "ebar_offsets", c.ebar_offsets);
  read(j, "n_eigenvectors_to_plot", c.n_plot);
  read(j, "scatter_eigenvector", c.scatter_eigenvector);
  read(j, "floor", c.floor);
  read(j, "identity_instances", c.identity_instances);
  std::string out = c.out_dir.string();
  read(j, "out", out);
  c.out_dir = out;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_json(c).dump(2) << '\n';
}

}  // namespace mlandscape::cli
