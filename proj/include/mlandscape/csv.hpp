#pragma once

#include <string>

namespace mlandscape::csv {

/// Shortest round-trip decimal form; "inf" / "-inf" / "nan" for non-finite.
std::string num(double x);

/// Inverse of num(). Throws InputError on malformed text.
double parse(const std::string& text);

}  // namespace mlandscape::csv
