#include "mmwshare/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mmwshare/error.hpp"

namespace mmwshare {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector linear_response(std::size_t count, double direction_cosine) {
  ComplexVector out(count);
  const double scale = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::size_t m = 0; m < count; ++m) {
    out[m] = std::polar(scale, -kPi * static_cast<double>(m) * direction_cosine);
  }
  return out;
}

}  // namespace

void ArrayGeometry::validate() const {
  require(n_horizontal >= 1 && n_vertical >= 1,
          "array geometry needs at least one element per axis (got " + std::to_string(n_horizontal) + "x" +
              std::to_string(n_vertical) + ")");
}

ComplexVector steering_vector_from_cosines(const ArrayGeometry& geometry, double u_horizontal,
                                           double u_vertical) {
  geometry.validate();
  const ComplexVector horizontal = linear_response(geometry.n_horizontal, u_horizontal);
  const ComplexVector vertical = linear_response(geometry.n_vertical, u_vertical);
  ComplexVector out;
  out.reserve(geometry.element_count());
  for (const Complex& h : horizontal) {
    for (const Complex& v : vertical) out.push_back(h * v);
  }
  return out;
}

ComplexVector steering_vector(const ArrayGeometry& geometry, double azimuth, double elevation) {
  require(azimuth >= 0.0 && azimuth < 2.0 * kPi, "steering_vector: azimuth outside [0, 2pi)");
  require(elevation > 0.0 && elevation <= kPi / 2.0, "steering_vector: elevation outside (0, pi/2]");
  return steering_vector_from_cosines(geometry, std::cos(azimuth) * std::cos(elevation), std::sin(elevation));
}

double pathloss_db(double distance, bool is_los, const PathlossParams& los, const PathlossParams& nlos,
                   double shadow_draw_db) {
  require(distance > 0.0, "pathloss_db: distance must be positive");
  const PathlossParams& p = is_los ? los : nlos;
  return p.alpha_db + p.beta_db_per_decade * std::log10(distance) + shadow_draw_db;
}

ChannelRealization draw_channel(const ArrayGeometry& geometry, std::span<const PathComponent> paths,
                                RandomStream& rng) {
  geometry.validate();
  require(!paths.empty(), "draw_channel: at least one path is required");
  const std::size_t n = geometry.element_count();
  ChannelRealization out{ComplexVector(n)};
  for (const PathComponent& path : paths) {
    require(path.variance >= 0.0, "draw_channel: negative path variance");
    const Complex gain = rng.complex_normal(path.variance);
    const ComplexVector a = steering_vector(geometry, path.azimuth, path.elevation);
    for (std::size_t i = 0; i < n; ++i) out.coefficients[i] += gain * a[i];
  }
  const double amplitude = std::sqrt(static_cast<double>(n));
  for (Complex& c : out.coefficients) c *= amplitude;
  return out;
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimensionMismatch, "inner_product: length " + std::to_string(a.size()) + " vs " +
                                            std::to_string(b.size()));
  }
  // spelled out in real arithmetic; std::complex operator* goes through the
  // NaN-recovering libgcc helper
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double received_power(const ChannelRealization& channel, std::span<const Complex> beam) {
  return std::norm(inner_product(channel.coefficients, beam));
}

}  // namespace mmwshare
