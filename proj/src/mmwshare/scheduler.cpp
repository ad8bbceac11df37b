#include "mmwshare/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmwshare/error.hpp"

namespace mmwshare {

namespace {

// Strictly better score wins; equal scores go to the lower UE index.
struct ArgMax {
  UeId best = 0;
  double score = -std::numeric_limits<double>::infinity();
  bool any = false;

  void offer(UeId ue, double s) {
    if (!any || s > score || (s == score && ue < best)) {
      best = ue;
      score = s;
      any = true;
    }
  }
};

double rate(double sinr) { return std::log2(1.0 + sinr); }

const BeamIndex& single_beam(const Decision& d) {
  const auto* beam = std::get_if<BeamIndex>(&d.beam);
  require(beam != nullptr, "low-overhead scheduling expects single-beam information from prior decisions");
  return *beam;
}

}  // namespace

PowerMatrix::PowerMatrix(std::size_t ue_count) : n_(ue_count), values_(ue_count * ue_count, 0.0), present_(ue_count * ue_count, 0) {}

void PowerMatrix::set(UeId intended, UeId victim, double power) {
  require(intended < n_ && victim < n_, "power matrix: UE index out of range");
  require(power >= 0.0, "power matrix: negative power");
  values_[intended * n_ + victim] = power;
  present_[intended * n_ + victim] = 1;
}

bool PowerMatrix::has(UeId intended, UeId victim) const {
  return intended < n_ && victim < n_ && present_[intended * n_ + victim] != 0;
}

double PowerMatrix::at(UeId intended, UeId victim) const {
  if (!has(intended, victim)) {
    fail(ErrorCode::kMissingEntry,
         "power matrix: missing P(" + std::to_string(intended) + ", " + std::to_string(victim) + ")");
  }
  return values_[intended * n_ + victim];
}

void PowerMatrix::scale(double factor) {
  require(factor > 0.0, "power matrix: scale factor must be positive");
  for (double& v : values_) v *= factor;
}

std::vector<std::size_t> FrameConfig::resolved_ranking(std::size_t bs_count) const {
  if (ranking.empty()) {
    std::vector<std::size_t> out(bs_count);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  require(ranking.size() == bs_count, "ranking must list every BS exactly once");
  std::vector<std::size_t> sorted = ranking;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < bs_count; ++i) require(sorted[i] == i, "ranking is not a permutation of the BS indices");
  return ranking;
}

double instantaneous_sinr(UeId u, std::span<const UeId> coscheduled, const PowerMatrix& powers, double noise) {
  require(noise >= 0.0, "noise power must be nonnegative");
  // fixed summation order so equal slots give bit-identical SINRs
  std::vector<UeId> others;
  others.reserve(coscheduled.size());
  for (const UeId q : coscheduled) {
    if (q != u) others.push_back(q);
  }
  std::sort(others.begin(), others.end());
  double interference = 0.0;
  for (const UeId q : others) interference += powers.at(q, u);
  return powers.at(u, u) / (interference + noise);
}

double partial_sinr(UeId u, std::span<const Decision> prior, const PowerMatrix& powers, double noise) {
  require(noise >= 0.0, "noise power must be nonnegative");
  double interference = 0.0;
  for (const Decision& d : prior) {
    require(d.ue != u, "partial SINR: UE already among prior decisions");
    interference += powers.at(d.ue, u);
  }
  return powers.at(u, u) / (interference + noise);
}

double partial_slnr(UeId u, std::span<const Decision> prior, const PowerMatrix& powers, double noise) {
  require(noise >= 0.0, "noise power must be nonnegative");
  double leakage = 0.0;
  for (const Decision& d : prior) {
    require(d.ue != u, "partial SLNR: UE already among prior decisions");
    leakage += powers.at(u, d.ue);
  }
  return powers.at(u, u) / (leakage + noise);
}

UeId sinr_successive_step(std::span<const UeId> candidates, std::span<const Decision> prior,
                          const PowerMatrix& powers, double noise) {
  require(!candidates.empty(), "SINR step: no candidates");
  ArgMax pick;
  for (const UeId u : candidates) pick.offer(u, rate(partial_sinr(u, prior, powers, noise)));
  return pick.best;
}

UeId slnr_successive_step(std::span<const UeId> candidates, std::span<const Decision> prior,
                          const PowerMatrix& powers, double noise) {
  require(!candidates.empty(), "SLNR step: no candidates");
  ArgMax pick;
  for (const UeId u : candidates) pick.offer(u, partial_slnr(u, prior, powers, noise));
  return pick.best;
}

UeId uncoordinated_snr_step(std::span<const Candidate> candidates) {
  require(!candidates.empty(), "SNR step: no candidates");
  ArgMax pick;
  for (const Candidate& c : candidates) pick.offer(c.ue, c.own_power);
  return pick.best;
}

double average_partial_slnr(std::size_t bs, BeamIndex beam, std::span<const Decision> prior,
                            const LeakageTable& table, double noise) {
  require(noise >= 0.0, "noise power must be nonnegative");
  double leakage = 0.0;
  for (const Decision& d : prior) {
    if (const auto* single = std::get_if<BeamIndex>(&d.beam)) {
      leakage += table.cross(bs, beam, d.bs, *single);
    } else {
      for (const BeamIndex phantom : std::get<ObfuscatedBeamSet>(d.beam).beams()) {
        leakage += table.cross(bs, beam, d.bs, phantom);
      }
    }
  }
  return table.own(bs, beam) / (leakage + noise);
}

UeId low_overhead_step(std::size_t bs, std::span<const Candidate> candidates, std::span<const Decision> prior,
                       const LeakageTable& table, double noise) {
  require(!candidates.empty(), "low-overhead step: no candidates");
  if (prior.empty()) return uncoordinated_snr_step(candidates);
  for (const Decision& d : prior) single_beam(d);
  ArgMax pick;
  for (const Candidate& c : candidates) pick.offer(c.ue, average_partial_slnr(bs, c.beam, prior, table, noise));
  return pick.best;
}

UeId robust_step(std::size_t bs, std::span<const Candidate> candidates, std::span<const Decision> prior,
                 const LeakageTable& table, double noise) {
  require(!candidates.empty(), "robust step: no candidates");
  if (prior.empty()) return uncoordinated_snr_step(candidates);
  for (const Decision& d : prior) {
    require(std::holds_alternative<ObfuscatedBeamSet>(d.beam),
            "robust scheduling expects obfuscated beam sets from prior decisions");
  }
  ArgMax pick;
  for (const Candidate& c : candidates) pick.offer(c.ue, average_partial_slnr(bs, c.beam, prior, table, noise));
  return pick.best;
}

ExhaustiveResult exhaustive_schedule(std::span<const std::vector<UeId>> ues_by_bs,
                                     std::span<const BeamIndex> beam_of_ue, const PowerMatrix& powers, double noise,
                                     std::size_t n_slots, std::uint64_t budget) {
  require(!ues_by_bs.empty(), "exhaustive schedule: no BSs");
  for (const auto& ues : ues_by_bs) {
    require(ues.size() == n_slots, "exhaustive schedule needs exactly one UE per slot for every BS");
  }

  std::uint64_t per_bs = 1;
  for (std::size_t k = 2; k <= n_slots; ++k) {
    if (per_bs > budget / k) fail(ErrorCode::kBudgetExceeded, "exhaustive schedule: enumeration exceeds budget");
    per_bs *= k;
  }
  std::uint64_t total = 1;
  for (std::size_t b = 1; b < ues_by_bs.size(); ++b) {
    if (total > budget / per_bs) fail(ErrorCode::kBudgetExceeded, "exhaustive schedule: enumeration exceeds budget");
    total *= per_bs;
  }
  if (total > budget) fail(ErrorCode::kBudgetExceeded, "exhaustive schedule: enumeration exceeds budget");

  const std::size_t n_bs = ues_by_bs.size();
  std::vector<std::vector<UeId>> order(ues_by_bs.begin(), ues_by_bs.end());
  for (std::size_t b = 1; b < n_bs; ++b) std::sort(order[b].begin(), order[b].end());

  std::vector<UeId> all_ues;
  for (const auto& ues : order) all_ues.insert(all_ues.end(), ues.begin(), ues.end());
  std::sort(all_ues.begin(), all_ues.end());
  std::vector<double> ue_rate(powers.ue_count(), 0.0);
  std::vector<UeId> slot(n_bs);
  const auto frame_rate = [&] {
    for (std::size_t s = 0; s < n_slots; ++s) {
      for (std::size_t b = 0; b < n_bs; ++b) slot[b] = order[b][s];
      for (std::size_t b = 0; b < n_bs; ++b) ue_rate[slot[b]] = rate(instantaneous_sinr(slot[b], slot, powers, noise));
    }
    double sum = 0.0;
    for (const UeId u : all_ues) sum += ue_rate[u];
    return sum;
  };

  double best_rate = -1.0;
  std::vector<std::vector<UeId>> best_order;
  while (true) {
    const double r = frame_rate();
    if (r > best_rate) {
      best_rate = r;
      best_order = order;
    }
    // odometer over the permutations of BSs 1..B-1
    std::size_t b = 1;
    while (b < n_bs && !std::next_permutation(order[b].begin(), order[b].end())) ++b;
    if (b >= n_bs) break;
  }

  ExhaustiveResult result;
  result.sum_rate = best_rate;
  result.schedule.slots.resize(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    for (std::size_t b = 0; b < n_bs; ++b) {
      const UeId ue = best_order[b][s];
      require(ue < beam_of_ue.size(), "exhaustive schedule: UE without a serving beam");
      result.schedule.slots[s].push_back(Decision{b, ue, beam_of_ue[ue]});
    }
  }
  return result;
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kExhaustive: return "exhaustive";
    case PolicyKind::kIdealSinr: return "ideal_sinr";
    case PolicyKind::kIdealSlnr: return "ideal_slnr";
    case PolicyKind::kLowOverhead: return "low_overhead";
    case PolicyKind::kRobust: return "robust";
    case PolicyKind::kUncoordinated: return "uncoordinated";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (const PolicyKind k : {PolicyKind::kExhaustive, PolicyKind::kIdealSinr, PolicyKind::kIdealSlnr,
                             PolicyKind::kLowOverhead, PolicyKind::kRobust, PolicyKind::kUncoordinated}) {
    if (policy_name(k) == name) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown policy '" + std::string(name) + "'");
}

std::string policy_label(const Policy& policy) {
  std::string label(policy_name(policy.kind));
  if (policy.kind == PolicyKind::kRobust) label += "_k" + std::to_string(policy.dummies);
  return label;
}

double FrameResult::sum_rate() const {
  std::vector<std::pair<UeId, double>> rates;
  for (std::size_t s = 0; s < sinr.size(); ++s) {
    for (std::size_t i = 0; i < sinr[s].size(); ++i) rates.emplace_back(schedule.slots[s][i].ue, rate(sinr[s][i]));
  }
  std::sort(rates.begin(), rates.end());
  double sum = 0.0;
  for (const auto& r : rates) sum += r.second;
  return sum;
}

FrameResult run_frame(const Policy& policy, const FrameInput& input, const FrameConfig& config, RandomStream& rng) {
  const std::size_t n_bs = input.ues_by_bs.size();
  require(n_bs >= 1, "run_frame: no BSs");
  require(config.n_slots >= 1, "run_frame: need at least one slot");
  require(input.powers != nullptr, "run_frame: power matrix required");
  for (const auto& ues : input.ues_by_bs) {
    if (ues.size() > config.n_slots) {
      fail(ErrorCode::kInvalidArgument, "run_frame: " + std::to_string(ues.size()) + " UEs cannot be served in " +
                                            std::to_string(config.n_slots) + " slots");
    }
  }
  const bool footprint_policy = policy.kind == PolicyKind::kLowOverhead || policy.kind == PolicyKind::kRobust;
  require(!footprint_policy || input.table != nullptr, "run_frame: footprint policies need a leakage table");
  require(input.operator_of_bs.empty() || input.operator_of_bs.size() == n_bs, "run_frame: operator map size");
  const PowerMatrix& powers = *input.powers;

  if (policy.kind == PolicyKind::kExhaustive) {
    ExhaustiveResult best =
        exhaustive_schedule(input.ues_by_bs, input.beam_of_ue, powers, input.noise, config.n_slots);
    FrameResult out{std::move(best.schedule), {}};
    for (const auto& slot : out.schedule.slots) {
      std::vector<UeId> ues;
      for (const Decision& d : slot) ues.push_back(d.ue);
      std::vector<double> sinr;
      for (const UeId u : ues) sinr.push_back(instantaneous_sinr(u, ues, powers, input.noise));
      out.sinr.push_back(std::move(sinr));
    }
    return out;
  }

  // one-shot obfuscation: one set per UE for the whole frame
  std::vector<ObfuscatedBeamSet> obfuscated;
  if (policy.kind == PolicyKind::kRobust) {
    obfuscated.reserve(input.beam_of_ue.size());
    for (const BeamIndex beam : input.beam_of_ue) {
      obfuscated.push_back(obfuscate(beam, policy.dummies, input.codebook_size, rng));
    }
  }
  const auto operator_of = [&](std::size_t bs) {
    return input.operator_of_bs.empty() ? bs : input.operator_of_bs[bs];
  };

  const std::vector<std::size_t> ranking = config.resolved_ranking(n_bs);
  std::vector<std::vector<UeId>> remaining(input.ues_by_bs.begin(), input.ues_by_bs.end());
  FrameResult out;
  out.schedule.slots.resize(config.n_slots);
  out.sinr.resize(config.n_slots);

  for (std::size_t s = 0; s < config.n_slots; ++s) {
    std::vector<Decision>& slot = out.schedule.slots[s];
    for (const std::size_t bs : ranking) {
      std::vector<UeId>& pool = remaining[bs];
      if (pool.empty()) continue;

      std::vector<Candidate> candidates;
      for (const UeId u : pool) candidates.push_back(Candidate{u, input.beam_of_ue[u], powers.at(u, u)});

      UeId chosen = 0;
      switch (policy.kind) {
        case PolicyKind::kIdealSinr:
          chosen = sinr_successive_step(pool, slot, powers, input.noise);
          break;
        case PolicyKind::kIdealSlnr:
          chosen = slnr_successive_step(pool, slot, powers, input.noise);
          break;
        case PolicyKind::kLowOverhead:
          chosen = low_overhead_step(bs, candidates, slot, *input.table, input.noise);
          break;
        case PolicyKind::kRobust: {
          // BSs of the same operator see each other's true beams
          std::vector<Decision> view;
          for (const Decision& d : slot) {
            Decision seen = d;
            if (operator_of(d.bs) == operator_of(bs)) {
              seen.beam = ObfuscatedBeamSet({input.beam_of_ue[d.ue]}, 0);
            }
            view.push_back(std::move(seen));
          }
          chosen = robust_step(bs, candidates, view, *input.table, input.noise);
          break;
        }
        case PolicyKind::kUncoordinated:
          chosen = uncoordinated_snr_step(candidates);
          break;
        case PolicyKind::kExhaustive:
          break;
      }

      Decision d{bs, chosen, input.beam_of_ue[chosen]};
      if (policy.kind == PolicyKind::kRobust) d.beam = obfuscated[chosen];
      slot.push_back(std::move(d));
      pool.erase(std::find(pool.begin(), pool.end(), chosen));
    }

    std::vector<UeId> ues;
    for (const Decision& d : slot) ues.push_back(d.ue);
    for (const UeId u : ues) out.sinr[s].push_back(instantaneous_sinr(u, ues, powers, input.noise));
  }
  return out;
}

}  // namespace mmwshare
