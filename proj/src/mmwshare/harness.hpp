#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmwshare/channel.hpp"
#include "mmwshare/codebook.hpp"
#include "mmwshare/random.hpp"
#include "mmwshare/scheduler.hpp"

namespace mmwshare {

/// Full experiment parameterization. Defaults reproduce the two-operator,
/// two-BS, 16x8 UPA, 50 m scenario.
struct ScenarioConfig {
  std::size_t operators = 2;
  std::size_t bs_count = 2;
  std::vector<Position> bs_positions{{12.5, 25.0, 10.0}, {37.5, 25.0, 10.0}};
  std::vector<std::size_t> bs_operator{0, 1};
  std::size_t ues_per_bs = 10;
  std::size_t slots = 10;
  ArrayGeometry array{16, 8};
  double area_side = 50.0;
  double cell_size = 0.5;
  PathlossParams los = kDefaultLosPathloss;
  PathlossParams nlos = kDefaultNlosPathloss;
  std::size_t paths = 5;
  /// Share of the normalized link variance carried by the NLOS paths.
  double nlos_variance = 0.0;
  double nlos_elevation_min_deg = 30.0;
  double nlos_elevation_max_deg = 60.0;
  double tx_power_dbm = 30.0;
  double noise_power_dbm = -84.0;
  std::vector<std::size_t> ranking;  // empty: ascending BS index
  std::vector<PolicyKind> policies{PolicyKind::kIdealSinr, PolicyKind::kIdealSlnr, PolicyKind::kLowOverhead,
                                   PolicyKind::kRobust, PolicyKind::kUncoordinated};
  double footprint_threshold = kDefaultFootprintThreshold;
  std::vector<std::size_t> k_values{0, 1, 3, 7, 15};
  double detection_area = 10.0;
  double target_dp = 0.1;
  std::vector<double> nlos_variances{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> export_beams;  // one-based beam numbers

  void validate() const;
  /// Spreads `bs_count` sites along the horizontal mid-line (10 m masts) and
  /// assigns operators round-robin.
  void place_sites_evenly();
  /// Noise power relative to the transmit power (linear).
  double relative_noise() const;
  FrameConfig frame_config() const { return FrameConfig{slots, ranking}; }

  bool operator==(const ScenarioConfig&) const = default;
};

/// Geometry-only objects shared by every Monte Carlo run of a scenario.
struct ScenarioContext {
  Codebook codebook;
  GroundGrid grid;
  FootprintAtlas atlas;
  LeakageTable table;

  static ScenarioContext build(const ScenarioConfig& config);
};

struct UserEquipment {
  Position position;
  std::size_t bs = 0;
  BeamIndex beam = 0;
};

struct ScenarioRealization {
  std::vector<UserEquipment> ues;
  std::vector<std::vector<UeId>> ues_by_bs;
  std::vector<ChannelRealization> channels;  // bs * ues.size() + ue
  PowerMatrix powers{0};
  double noise = 0.0;  // relative to transmit power

  const ChannelRealization& channel(std::size_t bs, UeId ue) const { return channels.at(bs * ues.size() + ue); }
  std::vector<BeamIndex> serving_beams() const;
  FrameInput frame_input(const ScenarioConfig& config, const ScenarioContext& context) const;
};

/// Nearest BS (3D distance) for every UE; lowest BS index on ties.
std::vector<std::size_t> nearest_bs(std::span<const Position> ues, std::span<const Position> sites);

/// Moves UEs out of overfull BSs, farthest first, each to the nearest BS
/// that still has room, until every BS holds at most `per_bs` UEs.
void rebalance_association(std::vector<std::size_t>& association, std::span<const Position> ues,
                           std::span<const Position> sites, std::size_t per_bs);

/// Builds channels, serving beams and the power matrix for given UE
/// positions and association.
ScenarioRealization realize_links(const ScenarioConfig& config, const ScenarioContext& context,
                                  std::vector<Position> positions, std::vector<std::size_t> association,
                                  RandomStream& rng);

/// Uniform UE drop, nearest-BS association with rebalancing, then
/// realize_links().
ScenarioRealization generate_scenario(const ScenarioConfig& config, const ScenarioContext& context,
                                      RandomStream& rng);

/// Realized log2(1 + SINR) of every UE, averaged over the slots in which it
/// was scheduled. Throws if a UE was never scheduled.
std::vector<double> evaluate_schedule(const ScheduleState& schedule, const ScenarioRealization& realization);

struct PolicyMetrics {
  Policy policy;
  double mean_se = 0.0;
  double half_width = 0.0;       // 95% normal approximation
  double gain_pct = 0.0;         // vs uncoordinated, same runs
  double gain_half_width = 0.0;  // from paired per-run differences
  std::vector<double> per_run_se;
};

struct PrivacyPoint {
  std::size_t dummies = 0;
  double detection_probability = 0.0;
  double equivocation_bits = 0.0;
};

struct RunMetrics {
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  std::vector<PolicyMetrics> policies;
  std::vector<PrivacyPoint> privacy;

  const PolicyMetrics& find(const Policy& policy) const;
  const PrivacyPoint& privacy_at(std::size_t dummies) const;
};

/// Seed of Monte Carlo run `run`: derive_seed(master, run). Inside a run,
/// child stream 0 drives the scenario and child 1000 + K the dummy beams of
/// robust policies with K dummies.
std::uint64_t run_seed(std::uint64_t master, std::size_t run);

/// Runs config.runs independent realizations and evaluates every policy on
/// each. The uncoordinated baseline is always evaluated. Privacy points are
/// reported for `privacy_k` (defaults to config.k_values when empty).
/// Results are bit-identical for any worker count.
RunMetrics monte_carlo(const ScenarioConfig& config, const ScenarioContext& context, std::span<const Policy> policies,
                       std::size_t workers = 1, std::span<const std::size_t> privacy_k = {});

/// Policies named in config.policies, robust expanded over config.k_values.
std::vector<Policy> configured_policies(const ScenarioConfig& config);

struct PrivacySweepRow {
  Policy policy;
  bool baseline = false;  // fixed-DP reference rows
  std::size_t dummies = 0;
  double detection_probability = 0.0;
  double equivocation_bits = 0.0;
  double mean_se = 0.0;
  double half_width = 0.0;
  double gain_pct = 0.0;
  double gain_half_width = 0.0;
};

struct PrivacySweep {
  std::vector<PrivacySweepRow> rows;  // robust rows by K, then baselines
  RunMetrics metrics;
};

/// Robust policy at every K plus the ideal SINR, ideal SLNR and uncoordinated
/// baselines (fixed DP, reported at K = 0). The low-overhead policy is run
/// as well and kept in `metrics`.
PrivacySweep sweep_privacy(const ScenarioConfig& config, const ScenarioContext& context,
                           std::span<const std::size_t> k_values, std::size_t workers = 1);

/// DP of UEs dropped uniformly over the area and served, in pure LOS, by the
/// strongest beam of their nearest BS (grid-cell average).
double geometric_detection_probability(const ScenarioConfig& config, const ScenarioContext& context,
                                       std::size_t dummies);

/// Serving-footprint areas of every UE of every run (run-major), from the
/// same scenario streams monte_carlo() uses, with the NLOS share forced to 0.
std::vector<double> realized_los_areas(const ScenarioConfig& config, const ScenarioContext& context,
                                       std::size_t workers = 1);

/// K whose DP over realized_los_areas() is closest to config.target_dp
/// (lowest K on ties).
std::size_t select_dummy_count(const ScenarioConfig& config, const ScenarioContext& context,
                               std::size_t workers = 1);

struct NlosSweepRow {
  double nlos_variance = 0.0;
  std::size_t dummies = 0;
  double detection_probability = 0.0;
  double robust_se = 0.0;
  double robust_half_width = 0.0;
  double uncoordinated_se = 0.0;
  double uncoordinated_half_width = 0.0;
  double gain_pct = 0.0;
  double gain_half_width = 0.0;
};

/// Gain of the robust policy over uncoordinated scheduling at the K chosen
/// by select_dummy_count(), one Monte Carlo per NLOS variance (same seeds).
/// The DP column is measured at each variance.
std::vector<NlosSweepRow> sweep_nlos(const ScenarioConfig& config, const ScenarioContext& context,
                                     std::span<const double> variances, std::size_t workers = 1);

/// Least-squares slope of y against x.
double fitted_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mmwshare
