#include "mmwshare/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>

#include "mmwshare/error.hpp"
#include "mmwshare/privacy.hpp"

namespace mmwshare {
namespace {

constexpr double kZ95 = 1.96;
constexpr std::uint64_t kScenarioStream = 0;
constexpr std::uint64_t kObfuscationStreamBase = 1000;

double distance(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double half_width_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return kZ95 * sd / std::sqrt(static_cast<double>(v.size()));
}

struct RunOutcome {
  std::vector<double> se;            // per policy
  std::vector<double> dp;            // per privacy K
  std::vector<double> equivocation;  // per privacy K, NaN if no UE has area
};

}  // namespace

void ScenarioConfig::validate() const {
  require(operators >= 1, "config: operators must be >= 1");
  require(bs_count >= 1, "config: bs_count must be >= 1");
  require(operators <= bs_count, "config: more operators than BSs");
  require(bs_positions.size() == bs_count, "config: need one site position per BS");
  require(bs_operator.size() == bs_count, "config: need one operator per BS");
  for (const std::size_t op : bs_operator) require(op < operators, "config: BS operator out of range");
  for (const Position& p : bs_positions) require(p.z > 0.0, "config: BS height must be positive");
  require(ues_per_bs >= 1, "config: ues_per_bs must be >= 1");
  require(slots == ues_per_bs, "config: slots must equal ues_per_bs");
  array.validate();
  require(area_side > 0.0 && cell_size > 0.0, "config: area and cell size must be positive");
  require(paths >= 1, "config: need at least one path");
  require(nlos_variance >= 0.0 && nlos_variance <= 1.0, "config: nlos variance must lie in [0, 1]");
  require(paths > 1 || nlos_variance == 0.0, "config: NLOS variance needs more than one path");
  require(nlos_elevation_min_deg > 0.0 && nlos_elevation_min_deg <= nlos_elevation_max_deg &&
              nlos_elevation_max_deg <= 90.0,
          "config: NLOS elevation range must satisfy 0 < min <= max <= 90");
  require(los.shadow_sigma_db >= 0.0 && nlos.shadow_sigma_db >= 0.0, "config: shadowing sigma must be >= 0");
  require(std::isfinite(tx_power_dbm) && std::isfinite(noise_power_dbm), "config: powers must be finite");
  if (!ranking.empty()) static_cast<void>(frame_config().resolved_ranking(bs_count));
  require(footprint_threshold > 0.0 && footprint_threshold < 1.0, "config: footprint threshold must lie in (0, 1)");
  require(!k_values.empty(), "config: k_values must not be empty");
  for (const std::size_t k : k_values) {
    require(k < array.element_count(), "config: K = " + std::to_string(k) + " exceeds N_BS - 1");
  }
  require(detection_area > 0.0, "config: detection area must be positive");
  require(target_dp > 0.0 && target_dp <= 1.0, "config: target DP must lie in (0, 1]");
  for (const double v : nlos_variances) require(v >= 0.0 && v <= 1.0, "config: nlos variances must lie in [0, 1]");
  require(runs >= 1, "config: runs must be >= 1");
  for (const std::size_t b : export_beams) {
    require(b >= 1 && b <= array.element_count(), "config: export beam numbers run from 1 to N_BS");
  }
}

void ScenarioConfig::place_sites_evenly() {
  bs_positions.clear();
  bs_operator.clear();
  for (std::size_t b = 0; b < bs_count; ++b) {
    const double x = area_side * (2.0 * static_cast<double>(b) + 1.0) / (2.0 * static_cast<double>(bs_count));
    bs_positions.push_back(Position{x, area_side / 2.0, 10.0});
    bs_operator.push_back(b % operators);
  }
}

double ScenarioConfig::relative_noise() const { return std::pow(10.0, (noise_power_dbm - tx_power_dbm) / 10.0); }

ScenarioContext ScenarioContext::build(const ScenarioConfig& config) {
  config.validate();
  Codebook codebook(config.array);
  GroundGrid grid(config.area_side, config.cell_size, config.bs_positions);
  FootprintAtlas atlas = FootprintAtlas::build(codebook, grid, config.los, config.footprint_threshold);
  LeakageTable table = build_leakage_table(atlas);
  return ScenarioContext{std::move(codebook), std::move(grid), std::move(atlas), std::move(table)};
}

std::vector<BeamIndex> ScenarioRealization::serving_beams() const {
  std::vector<BeamIndex> out;
  out.reserve(ues.size());
  for (const UserEquipment& ue : ues) out.push_back(ue.beam);
  return out;
}

std::vector<std::size_t> nearest_bs(std::span<const Position> ues, std::span<const Position> sites) {
  require(!sites.empty(), "nearest_bs: no sites");
  std::vector<std::size_t> out;
  out.reserve(ues.size());
  for (const Position& p : ues) {
    std::size_t best = 0;
    double best_d = distance(p, sites[0]);
    for (std::size_t b = 1; b < sites.size(); ++b) {
      const double d = distance(p, sites[b]);
      if (d < best_d) {
        best = b;
        best_d = d;
      }
    }
    out.push_back(best);
  }
  return out;
}

void rebalance_association(std::vector<std::size_t>& association, std::span<const Position> ues,
                           std::span<const Position> sites, std::size_t per_bs) {
  require(association.size() == ues.size(), "rebalance: association size mismatch");
  require(ues.size() <= per_bs * sites.size(), "rebalance: not enough room for every UE");
  std::vector<std::size_t> load(sites.size(), 0);
  for (const std::size_t b : association) {
    require(b < sites.size(), "rebalance: BS index out of range");
    ++load[b];
  }
  for (std::size_t b = 0; b < sites.size(); ++b) {
    while (load[b] > per_bs) {
      std::size_t far = ues.size();
      double far_d = -1.0;
      for (std::size_t u = 0; u < ues.size(); ++u) {
        if (association[u] != b) continue;
        const double d = distance(ues[u], sites[b]);
        if (d > far_d) {
          far = u;
          far_d = d;
        }
      }
      std::size_t target = sites.size();
      double target_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < sites.size(); ++j) {
        if (load[j] >= per_bs) continue;
        const double d = distance(ues[far], sites[j]);
        if (d < target_d) {
          target = j;
          target_d = d;
        }
      }
      association[far] = target;
      --load[b];
      ++load[target];
    }
  }
}

ScenarioRealization realize_links(const ScenarioConfig& config, const ScenarioContext& context,
                                  std::vector<Position> positions, std::vector<std::size_t> association,
                                  RandomStream& rng) {
  const std::size_t n_ue = positions.size();
  const std::size_t n_bs = config.bs_count;
  require(association.size() == n_ue, "realize_links: association size mismatch");

  ScenarioRealization out;
  out.ues.resize(n_ue);
  out.ues_by_bs.resize(n_bs);
  for (UeId u = 0; u < n_ue; ++u) {
    require(association[u] < n_bs, "realize_links: BS index out of range");
    out.ues[u].position = positions[u];
    out.ues[u].bs = association[u];
    out.ues_by_bs[association[u]].push_back(u);
  }

  const double v = config.nlos_variance;
  const std::size_t n_nlos = config.paths - 1;
  const double el_lo = config.nlos_elevation_min_deg * std::numbers::pi / 180.0;
  const double el_hi = config.nlos_elevation_max_deg * std::numbers::pi / 180.0;

  out.channels.reserve(n_bs * n_ue);
  std::vector<PathComponent> paths;
  for (std::size_t b = 0; b < n_bs; ++b) {
    for (UeId u = 0; u < n_ue; ++u) {
      const Direction dir = direction_between(config.bs_positions[b], positions[u]);
      const double shadow_los = rng.normal(0.0, config.los.shadow_sigma_db);
      const double shadow_nlos = rng.normal(0.0, config.nlos.shadow_sigma_db);
      const double los_gain = db_to_gain(pathloss_db(dir.distance, true, config.los, config.nlos, shadow_los));
      const double nlos_gain = db_to_gain(pathloss_db(dir.distance, false, config.los, config.nlos, shadow_nlos));

      paths.clear();
      paths.push_back(PathComponent{(1.0 - v) * los_gain, dir.azimuth, dir.elevation, true});
      for (std::size_t l = 0; l < n_nlos; ++l) {
        const double az = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double el = rng.uniform(el_lo, el_hi);
        paths.push_back(PathComponent{v / static_cast<double>(n_nlos) * nlos_gain, az, el, false});
      }
      out.channels.push_back(draw_channel(config.array, paths, rng));
    }
  }

  for (UeId u = 0; u < n_ue; ++u) out.ues[u].beam = best_beam(out.channel(out.ues[u].bs, u), context.codebook);

  out.powers = PowerMatrix(n_ue);
  for (UeId q = 0; q < n_ue; ++q) {
    const auto beam = context.codebook.beam(out.ues[q].beam);
    for (UeId u = 0; u < n_ue; ++u) out.powers.set(q, u, received_power(out.channel(out.ues[q].bs, u), beam));
  }
  out.noise = config.relative_noise();
  return out;
}

ScenarioRealization generate_scenario(const ScenarioConfig& config, const ScenarioContext& context,
                                      RandomStream& rng) {
  const std::size_t n_ue = config.bs_count * config.ues_per_bs;
  std::vector<Position> positions;
  positions.reserve(n_ue);
  for (std::size_t u = 0; u < n_ue; ++u) {
    const double x = rng.uniform(0.0, config.area_side);
    const double y = rng.uniform(0.0, config.area_side);
    positions.push_back(Position{x, y, 0.0});
  }
  std::vector<std::size_t> association = nearest_bs(positions, config.bs_positions);
  rebalance_association(association, positions, config.bs_positions, config.ues_per_bs);
  return realize_links(config, context, std::move(positions), std::move(association), rng);
}

FrameInput ScenarioRealization::frame_input(const ScenarioConfig& config, const ScenarioContext& context) const {
  // beam_of_ue must outlive the FrameInput; callers keep a copy alive
  FrameInput in;
  in.ues_by_bs = ues_by_bs;
  in.operator_of_bs = config.bs_operator;
  in.powers = &powers;
  in.table = &context.table;
  in.codebook_size = context.codebook.size();
  in.noise = noise;
  return in;
}

std::vector<double> evaluate_schedule(const ScheduleState& schedule, const ScenarioRealization& realization) {
  const std::size_t n_ue = realization.ues.size();
  std::vector<double> total(n_ue, 0.0);
  std::vector<std::size_t> count(n_ue, 0);
  for (const auto& slot : schedule.slots) {
    std::vector<UeId> ues;
    for (const Decision& d : slot) ues.push_back(d.ue);
    for (const UeId u : ues) {
      require(u < n_ue, "evaluate_schedule: UE index out of range");
      total[u] += std::log2(1.0 + instantaneous_sinr(u, ues, realization.powers, realization.noise));
      ++count[u];
    }
  }
  for (UeId u = 0; u < n_ue; ++u) {
    require(count[u] > 0, "evaluate_schedule: UE " + std::to_string(u) + " was never scheduled");
    total[u] /= static_cast<double>(count[u]);
  }
  return total;
}

const PolicyMetrics& RunMetrics::find(const Policy& policy) const {
  for (const PolicyMetrics& m : policies) {
    if (m.policy == policy) return m;
  }
  fail(ErrorCode::kMissingEntry, "no metrics for policy " + policy_label(policy));
}

const PrivacyPoint& RunMetrics::privacy_at(std::size_t dummies) const {
  for (const PrivacyPoint& p : privacy) {
    if (p.dummies == dummies) return p;
  }
  fail(ErrorCode::kMissingEntry, "no privacy point for K = " + std::to_string(dummies));
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return derive_seed(master, run); }

RunMetrics monte_carlo(const ScenarioConfig& config, const ScenarioContext& context, std::span<const Policy> policies,
                       std::size_t workers, std::span<const std::size_t> privacy_k) {
  config.validate();
  require(config.runs >= 1, "monte_carlo: need at least one run");
  require(workers >= 1, "monte_carlo: need at least one worker");

  std::vector<Policy> evaluated;
  for (const Policy& p : policies) {
    if (std::find(evaluated.begin(), evaluated.end(), p) == evaluated.end()) evaluated.push_back(p);
  }
  const Policy baseline{PolicyKind::kUncoordinated, 0};
  if (std::find(evaluated.begin(), evaluated.end(), baseline) == evaluated.end()) evaluated.push_back(baseline);
  const std::size_t baseline_index =
      static_cast<std::size_t>(std::find(evaluated.begin(), evaluated.end(), baseline) - evaluated.begin());
  for (const Policy& p : evaluated) {
    if (p.kind == PolicyKind::kRobust) {
      require(p.dummies < context.codebook.size(), "monte_carlo: K exceeds N_BS - 1");
    }
  }

  const std::vector<std::size_t> ks =
      privacy_k.empty() ? config.k_values : std::vector<std::size_t>(privacy_k.begin(), privacy_k.end());
  const FrameConfig frame = config.frame_config();

  std::vector<RunOutcome> outcomes(config.runs);
  const auto one_run = [&](std::size_t r) {
    RandomStream run_rng(run_seed(config.seed, r));
    RandomStream scenario_rng = run_rng.child(kScenarioStream);
    const ScenarioRealization scenario = generate_scenario(config, context, scenario_rng);
    const std::vector<BeamIndex> beams = scenario.serving_beams();
    FrameInput input = scenario.frame_input(config, context);
    input.beam_of_ue = beams;

    RunOutcome& out = outcomes[r];
    for (const Policy& p : evaluated) {
      RandomStream policy_rng = run_rng.child(kObfuscationStreamBase + p.dummies);
      const FrameResult result = run_frame(p, input, frame, policy_rng);
      out.se.push_back(mean_of(evaluate_schedule(result.schedule, scenario)));
    }

    std::vector<double> areas;
    std::vector<double> positive;
    for (const UserEquipment& ue : scenario.ues) {
      const double a = context.atlas.area(ue.bs, ue.beam);
      areas.push_back(a);
      if (a > 0.0) positive.push_back(a);
    }
    for (const std::size_t k : ks) {
      out.dp.push_back(detection_probability(k, areas, config.detection_area));
      if (positive.empty()) {
        out.equivocation.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        double e = 0.0;
        for (const double a : positive) e += equivocation_bits(k, a);
        out.equivocation.push_back(e / static_cast<double>(positive.size()));
      }
    }
  };

  const std::size_t n_threads = std::min(workers, config.runs);
  if (n_threads == 1) {
    for (std::size_t r = 0; r < config.runs; ++r) one_run(r);
  } else {
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < n_threads; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t r = w; r < config.runs; r += n_threads) one_run(r);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RunMetrics metrics;
  metrics.runs = config.runs;
  metrics.seed = config.seed;
  std::vector<double> base_se;
  for (const RunOutcome& o : outcomes) base_se.push_back(o.se[baseline_index]);
  const double base_mean = mean_of(base_se);

  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    PolicyMetrics m;
    m.policy = evaluated[i];
    std::vector<double> diff;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      m.per_run_se.push_back(outcomes[r].se[i]);
      diff.push_back(outcomes[r].se[i] - base_se[r]);
    }
    m.mean_se = mean_of(m.per_run_se);
    m.half_width = half_width_of(m.per_run_se);
    m.gain_pct = (m.mean_se / base_mean - 1.0) * 100.0;
    m.gain_half_width = half_width_of(diff) / base_mean * 100.0;
    metrics.policies.push_back(std::move(m));
  }

  for (std::size_t j = 0; j < ks.size(); ++j) {
    double dp = 0.0;
    double eq = 0.0;
    std::size_t eq_runs = 0;
    for (const RunOutcome& o : outcomes) {
      dp += o.dp[j];
      if (!std::isnan(o.equivocation[j])) {
        eq += o.equivocation[j];
        ++eq_runs;
      }
    }
    metrics.privacy.push_back(PrivacyPoint{ks[j], dp / static_cast<double>(outcomes.size()),
                                           eq_runs > 0 ? eq / static_cast<double>(eq_runs)
                                                       : std::numeric_limits<double>::quiet_NaN()});
  }
  return metrics;
}

std::vector<Policy> configured_policies(const ScenarioConfig& config) {
  std::vector<Policy> out;
  for (const PolicyKind kind : config.policies) {
    if (kind == PolicyKind::kRobust) {
      for (const std::size_t k : config.k_values) out.push_back(Policy{kind, k});
    } else {
      out.push_back(Policy{kind, 0});
    }
  }
  return out;
}

PrivacySweep sweep_privacy(const ScenarioConfig& config, const ScenarioContext& context,
                           std::span<const std::size_t> k_values, std::size_t workers) {
  require(!k_values.empty(), "sweep_privacy: no K values");
  std::vector<std::size_t> ks(k_values.begin(), k_values.end());
  if (std::find(ks.begin(), ks.end(), 0) == ks.end()) ks.push_back(0);

  std::vector<Policy> policies;
  for (const std::size_t k : k_values) policies.push_back(Policy{PolicyKind::kRobust, k});
  const Policy baselines[] = {{PolicyKind::kIdealSinr, 0}, {PolicyKind::kIdealSlnr, 0}, {PolicyKind::kUncoordinated, 0}};
  for (const Policy& p : baselines) policies.push_back(p);
  policies.push_back(Policy{PolicyKind::kLowOverhead, 0});

  PrivacySweep sweep;
  sweep.metrics = monte_carlo(config, context, policies, workers, ks);
  const auto row_for = [&](const Policy& p, std::size_t k, bool baseline) {
    const PolicyMetrics& m = sweep.metrics.find(p);
    const PrivacyPoint& priv = sweep.metrics.privacy_at(k);
    return PrivacySweepRow{p,          baseline,     k,          priv.detection_probability, priv.equivocation_bits,
                           m.mean_se, m.half_width, m.gain_pct, m.gain_half_width};
  };
  for (const std::size_t k : k_values) sweep.rows.push_back(row_for(Policy{PolicyKind::kRobust, k}, k, false));
  for (const Policy& p : baselines) sweep.rows.push_back(row_for(p, 0, true));
  return sweep;
}

double geometric_detection_probability(const ScenarioConfig& config, const ScenarioContext& context,
                                       std::size_t dummies) {
  const GroundGrid& grid = context.grid;
  std::vector<Position> centers;
  centers.reserve(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) centers.push_back(grid.cell_center(c));
  const std::vector<std::size_t> serving = nearest_bs(centers, config.bs_positions);
  std::vector<double> areas;
  areas.reserve(centers.size());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    areas.push_back(context.atlas.area(serving[c], context.atlas.strongest_beam(serving[c], c)));
  }
  return detection_probability(dummies, areas, config.detection_area);
}

std::vector<double> realized_los_areas(const ScenarioConfig& config, const ScenarioContext& context,
                                       std::size_t workers) {
  ScenarioConfig los = config;
  los.nlos_variance = 0.0;
  los.validate();
  require(workers >= 1, "realized_los_areas: need at least one worker");
  const std::size_t per_run = los.bs_count * los.ues_per_bs;
  std::vector<double> areas(los.runs * per_run, 0.0);
  const auto one_run = [&](std::size_t r) {
    RandomStream scenario_rng = RandomStream(run_seed(los.seed, r)).child(kScenarioStream);
    const ScenarioRealization s = generate_scenario(los, context, scenario_rng);
    for (std::size_t u = 0; u < per_run; ++u) areas[r * per_run + u] = context.atlas.area(s.ues[u].bs, s.ues[u].beam);
  };
  const std::size_t n_threads = std::min(workers, los.runs);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t r = w; r < los.runs; r += n_threads) one_run(r);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return areas;
}

std::size_t select_dummy_count(const ScenarioConfig& config, const ScenarioContext& context, std::size_t workers) {
  const std::vector<double> areas = realized_los_areas(config, context, workers);
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < context.codebook.size(); ++k) {
    const double err = std::abs(detection_probability(k, areas, config.detection_area) - config.target_dp);
    if (err < best_err) {
      best = k;
      best_err = err;
    }
  }
  return best;
}

std::vector<NlosSweepRow> sweep_nlos(const ScenarioConfig& config, const ScenarioContext& context,
                                     std::span<const double> variances, std::size_t workers) {
  require(!variances.empty(), "sweep_nlos: no variances");
  const std::size_t k = select_dummy_count(config, context, workers);
  const Policy robust{PolicyKind::kRobust, k};
  const Policy uncoordinated{PolicyKind::kUncoordinated, 0};
  const Policy policies[] = {robust, uncoordinated};
  const std::size_t privacy_k[] = {k};

  std::vector<NlosSweepRow> rows;
  for (const double v : variances) {
    require(v >= 0.0 && v <= 1.0, "sweep_nlos: variance must lie in [0, 1]");
    ScenarioConfig point = config;
    point.nlos_variance = v;
    const RunMetrics m = monte_carlo(point, context, policies, workers, privacy_k);
    const PolicyMetrics& r = m.find(robust);
    const PolicyMetrics& u = m.find(uncoordinated);
    rows.push_back(NlosSweepRow{v, k, m.privacy_at(k).detection_probability, r.mean_se, r.half_width, u.mean_se,
                                u.half_width, r.gain_pct, r.gain_half_width});
  }
  return rows;
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "fitted_slope: need at least two matching points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, "fitted_slope: x values are all equal");
  return sxy / sxx;
}

}  // namespace mmwshare
