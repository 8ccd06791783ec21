#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mlandscape {

/// Zero-based index into [0, n). External formats and reports are 1-based.
using Index = std::size_t;

/// Sorted, duplicate-free list of indices.
using IndexSet = std::vector<Index>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Malformed input: bad file, bad config, contract violation by the caller.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown: factorization failure, non-convergence, sign violation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorts and deduplicates in place; returns the argument for chaining.
IndexSet& normalize(IndexSet& s);

/// [0, n)
IndexSet full_set(std::size_t n);

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
IndexSet complement(const IndexSet& s, std::size_t n);
bool contains(const IndexSet& s, Index i);

/// Membership mask of length n. Throws InputError on an index >= n.
std::vector<bool> mask_of(const IndexSet& s, std::size_t n);

}  // namespace mlandscape
