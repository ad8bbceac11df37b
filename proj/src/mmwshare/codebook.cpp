#include "mmwshare/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "mmwshare/error.hpp"
#include "mmwshare/format.hpp"

namespace mmwshare {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexVector dft_column(std::size_t length, std::size_t column) {
  ComplexVector out(length);
  const double scale = 1.0 / std::sqrt(static_cast<double>(length));
  for (std::size_t m = 0; m < length; ++m) {
    // reduce m * column mod length first so the phase stays exact for large arrays
    const double k = static_cast<double>((m * column) % length);
    out[m] = std::polar(scale, -2.0 * kPi * k / static_cast<double>(length));
  }
  return out;
}

// Steering vectors toward every cell of the grid from one BS.
std::vector<ComplexVector> cell_responses(const ArrayGeometry& geometry, const GroundGrid& grid, std::size_t bs) {
  const Position& origin = grid.bs_positions().at(bs);
  std::vector<ComplexVector> out;
  out.reserve(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Direction d = direction_between(origin, grid.cell_center(c));
    out.push_back(steering_vector(geometry, d.azimuth, d.elevation));
  }
  return out;
}

}  // namespace

Codebook::Codebook(const ArrayGeometry& geometry) : geometry_(geometry) {
  geometry_.validate();
  std::vector<ComplexVector> horizontal;
  std::vector<ComplexVector> vertical;
  for (std::size_t h = 0; h < geometry_.n_horizontal; ++h) horizontal.push_back(dft_column(geometry_.n_horizontal, h));
  for (std::size_t v = 0; v < geometry_.n_vertical; ++v) vertical.push_back(dft_column(geometry_.n_vertical, v));

  beams_.reserve(geometry_.element_count());
  for (const ComplexVector& wh : horizontal) {
    for (const ComplexVector& wv : vertical) {
      ComplexVector beam;
      beam.reserve(geometry_.element_count());
      for (const Complex& a : wh) {
        for (const Complex& b : wv) beam.push_back(a * b);
      }
      beams_.push_back(std::move(beam));
    }
  }
}

std::span<const Complex> Codebook::beam(BeamIndex index) const {
  require(index < beams_.size(), "codebook beam index " + std::to_string(index) + " out of range");
  return beams_[index];
}

BeamIndex Codebook::index_of(std::size_t horizontal, std::size_t vertical) const {
  require(horizontal < geometry_.n_horizontal && vertical < geometry_.n_vertical,
          "codebook (h, v) index out of range");
  return geometry_.n_vertical * horizontal + vertical;
}

Codebook build_codebook(const ArrayGeometry& geometry) { return Codebook(geometry); }

Direction direction_between(const Position& bs, const Position& point) {
  const double dx = point.x - bs.x;
  const double dy = point.y - bs.y;
  const double drop = bs.z - point.z;
  const double ground = std::hypot(dx, dy);
  const double distance = std::hypot(ground, drop);
  require(distance > 0.0, "direction undefined: point colocated with BS");
  double azimuth = std::atan2(dy, dx);
  if (azimuth < 0.0) azimuth += 2.0 * kPi;
  if (azimuth >= 2.0 * kPi) azimuth = 0.0;
  return {azimuth, std::atan2(drop, ground), distance};
}

GroundGrid::GroundGrid(double area_side, double cell_size, std::vector<Position> bs_positions)
    : area_side_(area_side), cell_size_(cell_size), per_side_(0), bs_positions_(std::move(bs_positions)) {
  require(area_side > 0.0, "ground grid: area side must be positive");
  require(cell_size > 0.0, "ground grid: cell size must be positive");
  const double ratio = area_side / cell_size;
  const double rounded = std::round(ratio);
  require(rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * ratio,
          "ground grid: cell size must divide the area side exactly");
  per_side_ = static_cast<std::size_t>(rounded);
}

Position GroundGrid::cell_center(std::size_t cell) const {
  require(cell < cell_count(), "ground grid: cell index out of range");
  const std::size_t row = cell / per_side_;
  const std::size_t col = cell % per_side_;
  return {(static_cast<double>(col) + 0.5) * cell_size_, (static_cast<double>(row) + 0.5) * cell_size_, 0.0};
}

std::size_t GroundGrid::cell_at(double x, double y) const {
  require(x >= 0.0 && x <= area_side_ && y >= 0.0 && y <= area_side_, "ground grid: point outside area");
  const auto clamp_index = [this](double coord) {
    const auto i = static_cast<std::size_t>(coord / cell_size_);
    return std::min(i, per_side_ - 1);
  };
  return clamp_index(y) * per_side_ + clamp_index(x);
}

GainMap gain_map(const Codebook& codebook, const GroundGrid& grid, std::size_t bs, BeamIndex beam) {
  require(bs < grid.bs_positions().size(), "gain_map: BS index out of range");
  const std::span<const Complex> weights = codebook.beam(beam);
  const double n = static_cast<double>(codebook.geometry().element_count());
  GainMap map{bs, beam, grid.cell_area(), n, std::vector<double>(grid.cell_count())};
  const Position& origin = grid.bs_positions()[bs];
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Direction d = direction_between(origin, grid.cell_center(c));
    const ComplexVector a = steering_vector(codebook.geometry(), d.azimuth, d.elevation);
    map.gains[c] = n * std::norm(inner_product(a, weights));
  }
  return map;
}

std::vector<GainMap> gain_maps(const Codebook& codebook, const GroundGrid& grid, std::size_t bs) {
  require(bs < grid.bs_positions().size(), "gain_maps: BS index out of range");
  const double n = static_cast<double>(codebook.geometry().element_count());
  std::vector<GainMap> maps;
  maps.reserve(codebook.size());
  for (BeamIndex b = 0; b < codebook.size(); ++b) {
    maps.push_back(GainMap{bs, b, grid.cell_area(), n, std::vector<double>(grid.cell_count())});
  }
  const std::vector<ComplexVector> responses = cell_responses(codebook.geometry(), grid, bs);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    for (BeamIndex b = 0; b < codebook.size(); ++b) {
      maps[b].gains[c] = n * std::norm(inner_product(responses[c], codebook.beam(b)));
    }
  }
  return maps;
}

Footprint extract_footprint(const GainMap& map, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "extract_footprint: threshold must lie in (0, 1)");
  Footprint fp{map.bs, map.beam, {}, std::vector<std::uint8_t>(map.gains.size(), 0), 0.0};
  const double level = threshold * map.normalization;
  for (std::size_t c = 0; c < map.gains.size(); ++c) {
    if (map.gains[c] >= level) {
      fp.cells.push_back(c);
      fp.mask[c] = 1;
    }
  }
  fp.area = static_cast<double>(fp.cells.size()) * map.cell_area;
  return fp;
}

SectoredGains sectored_gains(const GainMap& map, const Footprint& footprint) {
  require(!footprint.empty(), "sectored_gains: empty footprint");
  require(footprint.mask.size() == map.gains.size(), "sectored_gains: footprint and map grids differ");
  double inside = 0.0;
  double outside = 0.0;
  for (std::size_t c = 0; c < map.gains.size(); ++c) {
    (footprint.mask[c] ? inside : outside) += map.gains[c];
  }
  const std::size_t n_in = footprint.cells.size();
  const std::size_t n_out = map.gains.size() - n_in;
  const double main_gain = inside / static_cast<double>(n_in);
  const double side_gain = n_out == 0 ? main_gain : outside / static_cast<double>(n_out);
  return {main_gain, side_gain};
}

BeamIndex best_beam(const ChannelRealization& channel, const Codebook& codebook) {
  BeamIndex best = 0;
  double best_power = -1.0;
  for (BeamIndex b = 0; b < codebook.size(); ++b) {
    const double p = received_power(channel, codebook.beam(b));
    if (p > best_power) {
      best_power = p;
      best = b;
    }
  }
  return best;
}

std::vector<double> path_gain_map(const GroundGrid& grid, std::size_t bs, const PathlossParams& los) {
  require(bs < grid.bs_positions().size(), "path_gain_map: BS index out of range");
  std::vector<double> out(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Direction d = direction_between(grid.bs_positions()[bs], grid.cell_center(c));
    out[c] = db_to_gain(pathloss_db(d.distance, true, los, los, 0.0));
  }
  return out;
}

double average_leakage(const Footprint& serving, const Footprint& reported, const SectoredGains& serving_gains,
                       std::span<const double> serving_path_gain) {
  require(!reported.empty(), "average_leakage: reported footprint is empty");
  require(serving.mask.size() == reported.mask.size() && serving_path_gain.size() == reported.mask.size(),
          "average_leakage: inputs defined on different grids");
  double acc = 0.0;
  for (const std::size_t c : reported.cells) {
    const double gain = serving.mask[c] ? serving_gains.main_gain : serving_gains.side_gain;
    acc += gain * serving_path_gain[c];
  }
  return acc / static_cast<double>(reported.cells.size());
}

double average_own_signal(const Footprint& footprint, const SectoredGains& gains,
                          std::span<const double> path_gain) {
  require(!footprint.empty(), "average_own_signal: empty footprint");
  require(path_gain.size() == footprint.mask.size(), "average_own_signal: inputs defined on different grids");
  double acc = 0.0;
  for (const std::size_t c : footprint.cells) acc += path_gain[c];
  return gains.main_gain * acc / static_cast<double>(footprint.cells.size());
}

FootprintAtlas FootprintAtlas::build(const Codebook& codebook, const GroundGrid& grid, const PathlossParams& los,
                                     double threshold) {
  FootprintAtlas atlas;
  atlas.beam_count_ = codebook.size();
  const std::size_t n_bs = grid.bs_positions().size();
  for (std::size_t bs = 0; bs < n_bs; ++bs) {
    const std::vector<GainMap> maps = gain_maps(codebook, grid, bs);
    for (const GainMap& map : maps) {
      Footprint fp = extract_footprint(map, threshold);
      // Beams whose main lobe misses the area keep an empty footprint and
      // zero gains; nothing downstream reads their gains.
      atlas.gains_.push_back(fp.empty() ? SectoredGains{} : sectored_gains(map, fp));
      atlas.footprints_.push_back(std::move(fp));
    }
    std::vector<BeamIndex> strongest(grid.cell_count(), 0);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      double best = -1.0;
      for (const GainMap& map : maps) {
        if (map.gains[c] > best) {
          best = map.gains[c];
          strongest[c] = map.beam;
        }
      }
    }
    atlas.strongest_.push_back(std::move(strongest));
    atlas.path_gains_.push_back(path_gain_map(grid, bs, los));
  }
  return atlas;
}

const Footprint& FootprintAtlas::footprint(std::size_t bs, BeamIndex beam) const {
  require(bs < bs_count() && beam < beam_count_, "footprint atlas: (bs, beam) out of range");
  return footprints_[bs * beam_count_ + beam];
}

const SectoredGains& FootprintAtlas::gains(std::size_t bs, BeamIndex beam) const {
  require(bs < bs_count() && beam < beam_count_, "footprint atlas: (bs, beam) out of range");
  return gains_[bs * beam_count_ + beam];
}

BeamIndex FootprintAtlas::strongest_beam(std::size_t bs, std::size_t cell) const {
  return strongest_.at(bs).at(cell);
}

LeakageTable::LeakageTable(std::size_t bs_count, std::size_t beam_count)
    : bs_count_(bs_count),
      beam_count_(beam_count),
      cross_(bs_count * beam_count * bs_count * beam_count, 0.0),
      own_(bs_count * beam_count, 0.0) {}

std::size_t LeakageTable::cross_slot(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported) const {
  if (b >= bs_count_ || j >= bs_count_ || serving >= beam_count_ || reported >= beam_count_) {
    fail(ErrorCode::kMissingEntry, "leakage table: index out of range");
  }
  if (b == j) fail(ErrorCode::kMissingEntry, "leakage table holds cross-BS entries only");
  return ((b * beam_count_ + serving) * bs_count_ + j) * beam_count_ + reported;
}

double LeakageTable::cross(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported) const {
  return cross_[cross_slot(b, serving, j, reported)];
}

double LeakageTable::own(std::size_t b, BeamIndex serving) const {
  if (b >= bs_count_ || serving >= beam_count_) fail(ErrorCode::kMissingEntry, "leakage table: index out of range");
  return own_[b * beam_count_ + serving];
}

void LeakageTable::set_cross(std::size_t b, BeamIndex serving, std::size_t j, BeamIndex reported, double value) {
  cross_[cross_slot(b, serving, j, reported)] = value;
}

void LeakageTable::set_own(std::size_t b, BeamIndex serving, double value) {
  if (b >= bs_count_ || serving >= beam_count_) fail(ErrorCode::kMissingEntry, "leakage table: index out of range");
  own_[b * beam_count_ + serving] = value;
}

LeakageTable build_leakage_table(const FootprintAtlas& atlas) {
  LeakageTable table(atlas.bs_count(), atlas.beam_count());
  for (std::size_t b = 0; b < atlas.bs_count(); ++b) {
    for (BeamIndex eu = 0; eu < atlas.beam_count(); ++eu) {
      const Footprint& serving = atlas.footprint(b, eu);
      const SectoredGains& g = atlas.gains(b, eu);
      if (!serving.empty()) table.set_own(b, eu, average_own_signal(serving, g, atlas.path_gains(b)));
      for (std::size_t j = 0; j < atlas.bs_count(); ++j) {
        if (j == b) continue;
        for (BeamIndex eq = 0; eq < atlas.beam_count(); ++eq) {
          const Footprint& reported = atlas.footprint(j, eq);
          if (reported.empty()) continue;
          table.set_cross(b, eu, j, eq, average_leakage(serving, reported, g, atlas.path_gains(b)));
        }
      }
    }
  }
  return table;
}

void write_grid_csv(std::ostream& out, const GroundGrid& grid, std::span<const double> values, int precision) {
  require(values.size() == grid.cell_count(), "write_grid_csv: value count does not match grid");
  const std::size_t n = grid.cells_per_side();
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      if (col) out << ',';
      out << format_fixed(values[row * n + col], precision);
    }
    out << '\n';
  }
}

}  // namespace mmwshare
