#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlandscape/matrix.hpp"

namespace mlandscape::cli {

/**
 * Experiment configuration. The file format is JSON; every key is optional
 * and missing keys keep the defaults below. Command-line flags override the
 * file.
 *
 *   {
 *     "ensemble":   {"n": 1000, "half_bandwidth": 1, "epsilon": 0.1, "seed": 0},
 *     "thresholds": [0.7] | "per-eigenvalue",
 *     "s": 2.0, "delta": 0.05, "alphas": [], "ebar_offsets": [0.0, 0.2],
 *     "n_eigenvectors_to_plot": 5, "scatter_eigenvector": 1,
 *     "floor": 1e-17, "identity_instances": 20, "out": "out"
 *   }
 */
struct ExperimentConfig {
  EnsembleConfig ensemble;
  /// Partition thresholds Ebar. Ignored when per_eigenvalue is set.
  std::vector<double> thresholds;
  /// Use Ebar_j = lambda_j + delta for the first `n_eigenvectors_to_plot` eigenvalues.
  bool per_eigenvalue = false;
  double s_requested = 2.0;
  double delta = 0.05;
  /// Localization rates; empty selects sqrt(1/W_c) and sqrt(2/W_c).
  std::vector<double> alphas;
  std::vector<double> ebar_offsets{0.0, 0.2};
  std::size_t n_plot = 5;
  /// 1-based eigenvector index used for the scatter.
  std::size_t scatter_eigenvector = 1;
  double floor = 1e-17;
  std::size_t identity_instances = 20;
  std::filesystem::path out_dir = "out";

  /// Throws InputError on non-positive or inconsistent values.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Throws InputError on unknown keys or wrongly typed values.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& c, const std::filesystem::path& path);

}  // namespace mlandscape::cli
