#include "mmwshare/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace mmwshare {

std::string format_fixed(double value, int precision) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  std::array<char, 128> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed,
                                       precision);
  if (ec != std::errc{}) return std::isnan(value) ? "nan" : "inf";
  return {buf.data(), end};
}

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return {buf.data(), end};
}

}  // namespace mmwshare
