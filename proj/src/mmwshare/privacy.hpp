#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmwshare/codebook.hpp"
#include "mmwshare/random.hpp"

namespace mmwshare {

/// Beam information exchanged with another operator: the serving beam mixed
/// with K dummy beams. Stored sorted so member order carries no information
/// about which beam is real.
class ObfuscatedBeamSet {
 public:
  ObfuscatedBeamSet(std::vector<BeamIndex> beams, std::size_t dummies);

  std::span<const BeamIndex> beams() const noexcept { return beams_; }
  std::size_t dummies() const noexcept { return dummies_; }
  std::size_t size() const noexcept { return beams_.size(); }
  bool contains(BeamIndex beam) const;

  bool operator==(const ObfuscatedBeamSet&) const = default;

 private:
  std::vector<BeamIndex> beams_;
  std::size_t dummies_;
};

/// Adds `dummies` distinct beams drawn uniformly without replacement from
/// the codebook minus the true beam.
ObfuscatedBeamSet obfuscate(BeamIndex true_beam, std::size_t dummies, std::size_t codebook_size,
                            RandomStream& rng);

/// log2((K + 1) * mean member area). Exact for equal member areas; every
/// member must have a positive area (indexed by beam in `footprint_areas`).
double equivocation(const ObfuscatedBeamSet& beams, std::span<const double> footprint_areas);

/// log2((K + 1) * area): location equivocation of a UE whose serving beam
/// illuminates `area` m^2 when K dummies are appended.
double equivocation_bits(std::size_t dummies, double area);

/// Mean over UEs of min(1, X / ((K + 1) |A_q|)). A zero area means the beam
/// pins the UE to nothing wider than a point, which clips to 1.
double detection_probability(std::size_t dummies, std::span<const double> ue_areas, double detection_area);

struct PrivacyReport {
  double equivocation_bits = 0.0;
  double detection_probability = 0.0;
};

/// Monte Carlo estimate (bits) of the differential entropy of a location
/// drawn uniformly from one of the regions (each region picked with equal
/// probability, then a uniform point inside it). Regions are sets of grid
/// cells. The density is estimated by a histogram with `subdivisions`^2
/// bins per grid cell, with the Miller-Madow bias correction.
double mixture_entropy(std::span<const std::vector<std::size_t>> regions, const GroundGrid& grid,
                       std::size_t samples, RandomStream& rng, std::size_t subdivisions = 2);

}  // namespace mmwshare
