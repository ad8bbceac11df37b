#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mmwshare/codebook.hpp"
#include "mmwshare/privacy.hpp"
#include "mmwshare/random.hpp"

namespace mmwshare {

/// Global UE index across all BSs.
using UeId = std::size_t;

/// Received powers P(q, u): power at UE u of the beam that serves UE q
/// (|h_{bs(q), u}^H w_{beam(q)}|^2). Entries that were never set are
/// reported as missing.
class PowerMatrix {
 public:
  explicit PowerMatrix(std::size_t ue_count);

  std::size_t ue_count() const noexcept { return n_; }
  void set(UeId intended, UeId victim, double power);
  double at(UeId intended, UeId victim) const;
  bool has(UeId intended, UeId victim) const;
  /// Multiplies every stored entry by `factor`.
  void scale(double factor);

 private:
  std::size_t n_;
  std::vector<double> values_;
  std::vector<std::uint8_t> present_;
};

/// Beam information appended to a scheduling decision.
using BeamInfo = std::variant<BeamIndex, ObfuscatedBeamSet>;

struct Decision {
  std::size_t bs = 0;
  UeId ue = 0;
  BeamInfo beam = BeamIndex{0};
};

struct ScheduleState {
  std::vector<std::vector<Decision>> slots;
};

struct FrameConfig {
  std::size_t n_slots = 10;
  /// Decision order of the BSs inside a slot; empty means ascending index.
  std::vector<std::size_t> ranking;

  /// Ranking resolved against a BS count (validates the permutation).
  std::vector<std::size_t> resolved_ranking(std::size_t bs_count) const;
};

/// P(u,u) / (sum_{q in coscheduled, q != u} P(q,u) + noise), interference
/// summed in UE index order.
double instantaneous_sinr(UeId u, std::span<const UeId> coscheduled, const PowerMatrix& powers, double noise);

/// SINR counting only interference from decisions already fixed by
/// higher-ranked BSs in the slot.
double partial_sinr(UeId u, std::span<const Decision> prior, const PowerMatrix& powers, double noise);

/// P(u,u) / (sum_{q in prior} P(u,q) + noise): leakage u would cause on the
/// UEs already scheduled.
double partial_slnr(UeId u, std::span<const Decision> prior, const PowerMatrix& powers, double noise);

/// argmax log2(1 + partial SINR); lowest UE index on ties.
UeId sinr_successive_step(std::span<const UeId> candidates, std::span<const Decision> prior,
                          const PowerMatrix& powers, double noise);

/// argmax partial SLNR; lowest UE index on ties.
UeId slnr_successive_step(std::span<const UeId> candidates, std::span<const Decision> prior,
                          const PowerMatrix& powers, double noise);

/// What a low-overhead BS knows about one of its own UEs.
struct Candidate {
  UeId ue = 0;
  BeamIndex beam = 0;
  double own_power = 0.0;  // |h_{b,u}^H w_{beam}|^2, locally measured
};

/// argmax own_power; lowest UE index on ties.
UeId uncoordinated_snr_step(std::span<const Candidate> candidates);

/// E[P(u,u)] / (sum over prior (bs, beam) pairs of E[P(u,q)] + noise), with
/// expectations read from the table. Prior beam info may be a single beam
/// or an obfuscated set; every member of a set counts as a phantom UE.
double average_partial_slnr(std::size_t bs, BeamIndex beam, std::span<const Decision> prior,
                            const LeakageTable& table, double noise);

/// Footprint-based SLNR step. The first BS to decide (no prior decisions)
/// falls back to the SNR rule. Prior decisions must carry single beams.
UeId low_overhead_step(std::size_t bs, std::span<const Candidate> candidates, std::span<const Decision> prior,
                       const LeakageTable& table, double noise);

/// Same as low_overhead_step but prior decisions carry obfuscated sets, each
/// expanded into K + 1 phantom UEs.
UeId robust_step(std::size_t bs, std::span<const Candidate> candidates, std::span<const Decision> prior,
                 const LeakageTable& table, double noise);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1'000'000;

struct ExhaustiveResult {
  ScheduleState schedule;
  double sum_rate = 0.0;  // sum of log2(1 + SINR) over the UEs, in UE index order
};

/// Exact maximizer of the frame sum-rate under the once-per-frame rule.
/// Slot order does not change the sum-rate, so BS 0 keeps its UE order and
/// the other BSs run through all (U!)^(B-1) permutations. Requires U = n_slots
/// for every BS; refuses instances whose enumeration exceeds `budget`.
ExhaustiveResult exhaustive_schedule(std::span<const std::vector<UeId>> ues_by_bs,
                                     std::span<const BeamIndex> beam_of_ue, const PowerMatrix& powers, double noise,
                                     std::size_t n_slots, std::uint64_t budget = kDefaultEnumerationBudget);

enum class PolicyKind { kExhaustive, kIdealSinr, kIdealSlnr, kLowOverhead, kRobust, kUncoordinated };

struct Policy {
  PolicyKind kind = PolicyKind::kUncoordinated;
  std::size_t dummies = 0;  // robust only

  bool operator==(const Policy&) const = default;
};

std::string_view policy_name(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);
/// e.g. "robust_k3" for robust policies, policy_name otherwise.
std::string policy_label(const Policy& policy);

/// Everything a policy may look at for one frame. Idealized policies read
/// `powers`; footprint policies read `table` and the serving beams.
struct FrameInput {
  std::span<const std::vector<UeId>> ues_by_bs;
  std::span<const BeamIndex> beam_of_ue;
  std::span<const std::size_t> operator_of_bs;  // empty: one operator per BS
  const PowerMatrix* powers = nullptr;
  const LeakageTable* table = nullptr;
  std::size_t codebook_size = 0;
  double noise = 0.0;
};

struct FrameResult {
  ScheduleState schedule;
  /// Realized SINR of every decision, aligned with schedule.slots.
  std::vector<std::vector<double>> sinr;

  /// Sum of log2(1 + SINR) over the scheduled UEs in UE index order.
  double sum_rate() const;
};

/// Schedules one frame: in each slot the BSs decide in ranking order, each
/// removing the chosen UE from its own pool, then realized SINRs follow from
/// the true power matrix. Robust policies draw one obfuscated set per UE at
/// the start of the frame from `rng`.
FrameResult run_frame(const Policy& policy, const FrameInput& input, const FrameConfig& config, RandomStream& rng);

}  // namespace mmwshare
