#pragma once

#include <string>

namespace mmwshare {

// Locale-independent number formatting (std::to_chars).

/// Fixed notation with `precision` digits after the point.
std::string format_fixed(double value, int precision);

/// Shortest text that parses back to the same double.
std::string format_shortest(double value);

}  // namespace mmwshare
