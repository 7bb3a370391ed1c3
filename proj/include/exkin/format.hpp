#pragma once

#include <string>

namespace exkin {

// Shortest-round-trip-safe text for a double ("%.17g"); infinities print
// as "inf"/"-inf" so outputs stay byte-identical across runs.
std::string format_double(double value);

// Inverse of format_double; also accepts "inf"/"infinity".
double parse_double(const std::string& text);

}  // namespace exkin
