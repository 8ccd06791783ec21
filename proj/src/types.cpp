#include "mlandscape/types.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace mlandscape {

IndexSet& normalize(IndexSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

IndexSet full_set(std::size_t n) {
  IndexSet s(n);
  for (Index i = 0; i < n; ++i) s[i] = i;
  return s;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet complement(const IndexSet& s, std::size_t n) {
  return set_difference(full_set(n), s);
}

bool contains(const IndexSet& s, Index i) {
  return std::binary_search(s.begin(), s.end(), i);
}

std::vector<bool> mask_of(const IndexSet& s, std::size_t n) {
  std::vector<bool> m(n, false);
  for (Index i : s) {
    if (i >= n) throw InputError("index " + std::to_string(i) + " out of range");
    m[i] = true;
  }
  return m;
}

}  // namespace mlandscape
