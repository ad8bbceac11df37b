#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmwshare/channel.hpp"

namespace mmwshare {

/// Zero-based beam position in a codebook. The one-based beam number used
/// in exported files is `index + 1`.
using BeamIndex = std::size_t;

/// Kronecker DFT codebook: beam (h, v) = w_H,h (x) w_E,v with
/// w_H,h[m] = exp(-i 2pi m h / N_H) / sqrt(N_H), likewise for the vertical
/// axis. Beam (h, v) sits at index N_E * h + v, so it steers toward the
/// direction cosines (2h/N_H, 2v/N_E) folded into [-1, 1).
class Codebook {
 public:
  explicit Codebook(const ArrayGeometry& geometry);

  const ArrayGeometry& geometry() const noexcept { return geometry_; }
  std::size_t size() const noexcept { return beams_.size(); }
  std::span<const Complex> beam(BeamIndex index) const;

  /// Zero-based (h, v) -> zero-based beam index.
  BeamIndex index_of(std::size_t horizontal, std::size_t vertical) const;

 private:
  ArrayGeometry geometry_;
  std::vector<ComplexVector> beams_;
};

Codebook build_codebook(const ArrayGeometry& geometry);

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Position&) const = default;
};

/// Propagation direction from a BS to a point, in the conventions of
/// steering_vector(): azimuth in [0, 2pi), elevation measured downward from
/// the horizon.
struct Direction {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 0.0;
};

Direction direction_between(const Position& bs, const Position& point);

/// Square network area tiled by square cells. Cell index = row * n + col
/// where row follows y and col follows x, both ascending.
class GroundGrid {
 public:
  GroundGrid(double area_side, double cell_size, std::vector<Position> bs_positions);

  double area_side() const noexcept { return area_side_; }
  double cell_size() const noexcept { return cell_size_; }
  double cell_area() const noexcept { return cell_size_ * cell_size_; }
  std::size_t cells_per_side() const noexcept { return per_side_; }
  std::size_t cell_count() const noexcept { return per_side_ * per_side_; }
  Position cell_center(std::size_t cell) const;
  /// Cell containing a ground point; points on the far edges map inward.
  std::size_t cell_at(double x, double y) const;

  const std::vector<Position>& bs_positions() const noexcept { return bs_positions_; }

 private:
  double area_side_;
  double cell_size_;
  std::size_t per_side_;
  std::vector<Position> bs_positions_;
};

struct GainMap {
  std::size_t bs = 0;
  BeamIndex beam = 0;
  double cell_area = 0.0;
  /// Gain treated as "normalized gain 1" by extract_footprint. For maps built
  /// by gain_map() this is N_BS, the gain of a perfectly matched beam.
  double normalization = 1.0;
  std::vector<double> gains;
};

/// Beamforming gain N_BS |a(az_c, el_c)^H w|^2 for every cell c of the grid.
GainMap gain_map(const Codebook& codebook, const GroundGrid& grid, std::size_t bs, BeamIndex beam);

/// All beams of one BS at once; equivalent to calling gain_map per beam.
std::vector<GainMap> gain_maps(const Codebook& codebook, const GroundGrid& grid, std::size_t bs);

struct Footprint {
  std::size_t bs = 0;
  BeamIndex beam = 0;
  std::vector<std::size_t> cells;  // ascending
  std::vector<std::uint8_t> mask;  // per grid cell
  double area = 0.0;

  bool empty() const noexcept { return cells.empty(); }
  bool contains(std::size_t cell) const { return mask.at(cell) != 0; }
};

inline constexpr double kDefaultFootprintThreshold = 0.5;

/// Cells with gain >= threshold * map.normalization.
Footprint extract_footprint(const GainMap& map, double threshold = kDefaultFootprintThreshold);

/// Two-level antenna model: main_gain inside the footprint, side_gain outside.
struct SectoredGains {
  double main_gain = 0.0;
  double side_gain = 0.0;
};

/// Mean gain inside / outside the footprint. A footprint that covers the
/// whole grid has no outside region; side_gain then equals main_gain.
SectoredGains sectored_gains(const GainMap& map, const Footprint& footprint);

/// argmax_eta |h^H w_eta|^2, lowest index on ties.
BeamIndex best_beam(const ChannelRealization& channel, const Codebook& codebook);

/// Mean LOS path gain 10^(-PL_LOS(d)/10) from a BS to every cell, without
/// shadowing.
std::vector<double> path_gain_map(const GroundGrid& grid, std::size_t bs, const PathlossParams& los);

/// Expected leakage of the serving beam onto a UE uniformly located in the
/// reported footprint: mean over reported cells of
/// (main_gain if the cell is in the serving footprint else side_gain) times
/// the serving BS path gain to that cell.
double average_leakage(const Footprint& serving, const Footprint& reported, const SectoredGains& serving_gains,
                       std::span<const double> serving_path_gain);

/// Expected own-signal power: mean of main_gain * path gain over the footprint.
double average_own_signal(const Footprint& footprint, const SectoredGains& gains,
                          std::span<const double> path_gain);

/// Footprints, sectored gains and path-gain maps for every (BS, beam) of a
/// scenario. Immutable once built.
class FootprintAtlas {
 public:
  static FootprintAtlas build(const Codebook& codebook, const GroundGrid& grid, const PathlossParams& los,
                              double threshold = kDefaultFootprintThreshold);

  std::size_t bs_count() const noexcept { return path_gains_.size(); }
  std::size_t beam_count() const noexcept { return beam_count_; }
  const Footprint& footprint(std::size_t bs, BeamIndex beam) const;
  const SectoredGains& gains(std::size_t bs, BeamIndex beam) const;
  double area(std::size_t bs, BeamIndex beam) const { return footprint(bs, beam).area; }
  std::span<const double> path_gains(std::size_t bs) const { return path_gains_.at(bs); }
  /// Beam with the highest gain at a cell (LOS beam choice at that spot).
  BeamIndex strongest_beam(std::size_t bs, std::size_t cell) const;

 private:
  std::size_t beam_count_ = 0;
  std::vector<Footprint> footprints_;     // bs * beam_count + beam
  std::vector<SectoredGains> gains_;      // same layout
  std::vector<std::vector<double>> path_gains_;
  std::vector<std::vector<BeamIndex>> strongest_;
};

/// Expected received powers indexed by (BS, beam) pairs.
///   cross(b, eu, j, eq): leakage of BS b's beam eu onto a UE of BS j served
///                        by beam eq (b != j).
///   own(b, eu):          own-signal expectation of a UE served by (b, eu).
/// Entries whose reported footprint is empty are zero: no plausible UE
/// location lies inside the area.
class LeakageTable {
 public:
  LeakageTable(std::size_t bs_count, std::size_t beam_count);

  std::size_t bs_count() const noexcept { return bs_count_; }
  std::size_t beam_count() const noexcept { return beam_count_; }

  double cross(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported) const;
  double own(std::size_t b, BeamIndex serving) const;
  void set_cross(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported, double value);
  void set_own(std::size_t b, BeamIndex serving, double value);

 private:
  std::size_t cross_slot(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported) const;

  std::size_t bs_count_;
  std::size_t beam_count_;
  std::vector<double> cross_;
  std::vector<double> own_;
};

LeakageTable build_leakage_table(const FootprintAtlas& atlas);

/// Writes a row-major matrix (one grid row per line, comma separated).
void write_grid_csv(std::ostream& out, const GroundGrid& grid, std::span<const double> values, int precision = 6);

}  // namespace mmwshare
