#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mmwshare/random.hpp"

namespace mmwshare {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Uniform planar array shape. Elements are ordered horizontal-major: the
/// element (m, n) sits at position m * n_vertical + n, matching a_H (x) a_E.
struct ArrayGeometry {
  std::size_t n_horizontal = 16;
  std::size_t n_vertical = 8;

  std::size_t element_count() const noexcept { return n_horizontal * n_vertical; }
  void validate() const;

  bool operator==(const ArrayGeometry&) const = default;
};

/// One propagation path. `variance` is the linear average power of the
/// complex path gain and already includes the large-scale pathloss.
struct PathComponent {
  double variance = 0.0;
  double azimuth = 0.0;    // [0, 2pi)
  double elevation = 0.0;  // (0, pi/2]
  bool is_los = false;
};

struct ChannelRealization {
  ComplexVector coefficients;
};

struct PathlossParams {
  double alpha_db = 0.0;
  double beta_db_per_decade = 0.0;
  double shadow_sigma_db = 0.0;

  bool operator==(const PathlossParams&) const = default;
};

/// 28 GHz street-canyon fits used as defaults.
inline constexpr PathlossParams kDefaultLosPathloss{61.4, 20.0, 5.8};
inline constexpr PathlossParams kDefaultNlosPathloss{72.0, 29.2, 8.7};

/// Unit-norm UPA response a_H(azimuth, elevation) (x) a_E(elevation) with
/// phase progressions -pi m cos(az) cos(el) and -pi n sin(el).
ComplexVector steering_vector(const ArrayGeometry& geometry, double azimuth, double elevation);

/// Same response parameterized directly by the direction cosines
/// u_h = cos(az) cos(el) and u_v = sin(el); no range checks on (u_h, u_v).
ComplexVector steering_vector_from_cosines(const ArrayGeometry& geometry, double u_horizontal,
                                           double u_vertical);

/// alpha + beta log10(distance) + shadow_draw, with the LOS or NLOS fit.
double pathloss_db(double distance, bool is_los, const PathlossParams& los, const PathlossParams& nlos,
                   double shadow_draw_db);

/// Linear power gain 10^(-PL/10).
inline double db_to_gain(double loss_db) noexcept { return std::pow(10.0, -loss_db / 10.0); }

/// h = sqrt(N) * sum_l alpha_l a(az_l, el_l), alpha_l ~ CN(0, variance_l).
/// Gains are drawn in path order, one complex normal per path.
ChannelRealization draw_channel(const ArrayGeometry& geometry, std::span<const PathComponent> paths,
                                RandomStream& rng);

/// Conjugate inner product sum_i conj(a_i) b_i.
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);

/// |h^H w|^2.
double received_power(const ChannelRealization& channel, std::span<const Complex> beam);

}  // namespace mmwshare
