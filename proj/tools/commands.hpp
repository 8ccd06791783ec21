#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mlandscape/spectral.hpp"

namespace mlandscape::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2, kNumerical = 3 };

/// Test seams; production runs pass the defaults.
struct Hooks {
  /// Applied to the global eigendecomposition before verification.
  std::function<void(EigenDecomposition&)> eigen_hook;
};

/**
 * Entry point shared by the executable and the tests. `args` excludes the
 * program name. Errors are reported on `err` and mapped to the exit codes:
 * 1 for usage, configuration and I/O errors, 2 when a proved inequality
 * fails, 3 for solver failures.
 */
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace mlandscape::cli
