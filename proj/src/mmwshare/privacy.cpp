#include "mmwshare/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "mmwshare/error.hpp"

namespace mmwshare {

ObfuscatedBeamSet::ObfuscatedBeamSet(std::vector<BeamIndex> beams, std::size_t dummies)
    : beams_(std::move(beams)), dummies_(dummies) {
  std::sort(beams_.begin(), beams_.end());
  require(std::adjacent_find(beams_.begin(), beams_.end()) == beams_.end(), "obfuscated beam set: duplicate beams");
  require(beams_.size() == dummies_ + 1, "obfuscated beam set: size must be K + 1");
}

bool ObfuscatedBeamSet::contains(BeamIndex beam) const {
  return std::binary_search(beams_.begin(), beams_.end(), beam);
}

ObfuscatedBeamSet obfuscate(BeamIndex true_beam, std::size_t dummies, std::size_t codebook_size,
                            RandomStream& rng) {
  require(true_beam < codebook_size, "obfuscate: true beam outside the codebook");
  require(dummies < codebook_size,
          "obfuscate: K = " + std::to_string(dummies) + " exceeds N_BS - 1 = " + std::to_string(codebook_size - 1));
  std::vector<BeamIndex> pool;
  pool.reserve(codebook_size - 1);
  for (BeamIndex b = 0; b < codebook_size; ++b) {
    if (b != true_beam) pool.push_back(b);
  }
  // partial Fisher-Yates: the first `dummies` slots end up a uniform sample
  for (std::size_t i = 0; i < dummies; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<BeamIndex> members(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(dummies));
  members.push_back(true_beam);
  return ObfuscatedBeamSet(std::move(members), dummies);
}

double equivocation_bits(std::size_t dummies, double area) {
  require(area > 0.0, "equivocation: footprint area must be positive");
  return std::log2(static_cast<double>(dummies + 1) * area);
}

double equivocation(const ObfuscatedBeamSet& beams, std::span<const double> footprint_areas) {
  double total = 0.0;
  for (const BeamIndex b : beams.beams()) {
    require(b < footprint_areas.size(), "equivocation: no recorded area for beam " + std::to_string(b));
    require(footprint_areas[b] > 0.0, "equivocation: beam " + std::to_string(b) + " has an empty footprint");
    total += footprint_areas[b];
  }
  return equivocation_bits(beams.dummies(), total / static_cast<double>(beams.size()));
}

double detection_probability(std::size_t dummies, std::span<const double> ue_areas, double detection_area) {
  require(!ue_areas.empty(), "detection_probability: no UEs");
  require(detection_area > 0.0, "detection_probability: detection area must be positive");
  const auto term = [&](double area) {
    require(area >= 0.0, "detection_probability: negative footprint area");
    const double plausible = static_cast<double>(dummies + 1) * area;
    return plausible > detection_area ? detection_area / plausible : 1.0;
  };
  // mean as first term plus the mean deviation (Neumaier-summed), exact
  // when all UEs see the same ratio
  const double shift = term(ue_areas.front());
  double total = 0.0;
  double carry = 0.0;
  for (const double area : ue_areas) {
    const double d = term(area) - shift;
    const double next = total + d;
    carry += std::abs(total) >= std::abs(d) ? (total - next) + d : (d - next) + total;
    total = next;
  }
  return shift + (total + carry) / static_cast<double>(ue_areas.size());
}

double mixture_entropy(std::span<const std::vector<std::size_t>> regions, const GroundGrid& grid,
                       std::size_t samples, RandomStream& rng, std::size_t subdivisions) {
  require(!regions.empty(), "mixture_entropy: no regions");
  require(samples > 0 && subdivisions > 0, "mixture_entropy: need samples and at least one bin per cell");
  for (const auto& r : regions) require(!r.empty(), "mixture_entropy: empty region");

  const std::size_t n = grid.cells_per_side();
  const std::size_t fine = n * subdivisions;
  const double bin = grid.cell_size() / static_cast<double>(subdivisions);
  std::vector<std::uint32_t> counts(fine * fine, 0);

  for (std::size_t s = 0; s < samples; ++s) {
    const auto& region = regions[rng.below(regions.size())];
    const Position center = grid.cell_center(region[rng.below(region.size())]);
    const double x = center.x + (rng.uniform() - 0.5) * grid.cell_size();
    const double y = center.y + (rng.uniform() - 0.5) * grid.cell_size();
    const auto col = std::min(static_cast<std::size_t>(x / bin), fine - 1);
    const auto row = std::min(static_cast<std::size_t>(y / bin), fine - 1);
    ++counts[row * fine + col];
  }

  const double total = static_cast<double>(samples);
  double entropy = 0.0;
  std::size_t occupied = 0;
  for (const std::uint32_t c : counts) {
    if (c == 0) continue;
    ++occupied;
    const double p = static_cast<double>(c) / total;
    entropy -= p * std::log2(p);
  }
  const double miller_madow = static_cast<double>(occupied - 1) / (2.0 * total * std::numbers::ln2);
  return entropy + miller_madow + std::log2(bin * bin);
}

}  // namespace mmwshare
