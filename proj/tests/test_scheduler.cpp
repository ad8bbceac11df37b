#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mmwshare/error.hpp"
#include "mmwshare/scheduler.hpp"
#include "oracles.hpp"

using namespace mmwshare;

namespace {

struct Instance {
  std::vector<std::vector<UeId>> ues_by_bs;
  std::vector<BeamIndex> beams;
  PowerMatrix powers{0};
  LeakageTable table{1, 1};
  std::size_t codebook = 8;
  double noise = 0.05;

  FrameInput input() const {
    FrameInput in;
    in.ues_by_bs = ues_by_bs;
    in.beam_of_ue = beams;
    in.powers = &powers;
    in.table = &table;
    in.codebook_size = codebook;
    in.noise = noise;
    return in;
  }
};

Instance random_instance(std::size_t n_bs, std::size_t per_bs, RandomStream& rng) {
  Instance inst;
  const std::size_t n = n_bs * per_bs;
  inst.ues_by_bs.resize(n_bs);
  inst.powers = PowerMatrix(n);
  inst.table = LeakageTable(n_bs, inst.codebook);
  for (std::size_t b = 0; b < n_bs; ++b) {
    for (std::size_t i = 0; i < per_bs; ++i) inst.ues_by_bs[b].push_back(b * per_bs + i);
  }
  for (std::size_t u = 0; u < n; ++u) inst.beams.push_back(rng.below(inst.codebook));
  for (std::size_t q = 0; q < n; ++q) {
    for (std::size_t u = 0; u < n; ++u) inst.powers.set(q, u, q == u ? rng.uniform(1.0, 20.0) : rng.uniform(0.0, 2.0));
  }
  for (std::size_t b = 0; b < n_bs; ++b) {
    for (BeamIndex e = 0; e < inst.codebook; ++e) {
      inst.table.set_own(b, e, rng.uniform(1.0, 10.0));
      for (std::size_t j = 0; j < n_bs; ++j) {
        if (j == b) continue;
        for (BeamIndex f = 0; f < inst.codebook; ++f) inst.table.set_cross(b, e, j, f, rng.uniform(0.0, 2.0));
      }
    }
  }
  return inst;
}

std::vector<Policy> successive_policies() {
  return {{PolicyKind::kIdealSinr, 0}, {PolicyKind::kIdealSlnr, 0}, {PolicyKind::kLowOverhead, 0},
          {PolicyKind::kRobust, 0},    {PolicyKind::kRobust, 3},    {PolicyKind::kUncoordinated, 0}};
}

}  // namespace

TEST_CASE("power matrix") {
  PowerMatrix p(3);
  CHECK_FALSE(p.has(0, 1));
  try {
    (void)p.at(0, 1);
    FAIL("expected a missing entry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingEntry);
  }
  p.set(0, 1, 2.0);
  CHECK(p.at(0, 1) == 2.0);
  p.scale(3.0);
  CHECK(p.at(0, 1) == 6.0);
  CHECK_THROWS_AS(p.set(0, 3, 1.0), Error);
  CHECK_THROWS_AS(p.set(0, 1, -1.0), Error);
  CHECK_THROWS_AS(p.scale(0.0), Error);
}

TEST_CASE("SINR and SLNR against direct formulas") {
  RandomStream rng(21);
  const Instance inst = random_instance(3, 2, rng);
  const std::vector<UeId> slot{0, 2, 5};
  for (const UeId u : slot) CHECK(instantaneous_sinr(u, slot, inst.powers, inst.noise) ==
                                  doctest::Approx(oracle::sinr(u, slot, inst.powers, inst.noise)));
  const std::vector<Decision> prior{{0, 0, BeamIndex{1}}, {2, 5, BeamIndex{2}}};
  const double expect_sinr = inst.powers.at(3, 3) / (inst.powers.at(0, 3) + inst.powers.at(5, 3) + inst.noise);
  const double expect_slnr = inst.powers.at(3, 3) / (inst.powers.at(3, 0) + inst.powers.at(3, 5) + inst.noise);
  CHECK(partial_sinr(3, prior, inst.powers, inst.noise) == doctest::Approx(expect_sinr));
  CHECK(partial_slnr(3, prior, inst.powers, inst.noise) == doctest::Approx(expect_slnr));
  CHECK(partial_sinr(3, {}, inst.powers, inst.noise) == doctest::Approx(inst.powers.at(3, 3) / inst.noise));
  CHECK_THROWS_AS(partial_sinr(0, prior, inst.powers, inst.noise), Error);
  CHECK_THROWS_AS(instantaneous_sinr(0, slot, inst.powers, -1.0), Error);
}

TEST_CASE("successive steps match a scan") {
  RandomStream rng(8);
  for (int t = 0; t < 200; ++t) {
    const Instance inst = random_instance(3, 4, rng);
    const std::vector<Decision> prior{{0, 1, BeamIndex{inst.beams[1]}}, {1, 6, BeamIndex{inst.beams[6]}}};
    const auto& pool = inst.ues_by_bs[2];
    UeId best_sinr = pool[0], best_slnr = pool[0];
    for (const UeId u : pool) {
      if (partial_sinr(u, prior, inst.powers, inst.noise) > partial_sinr(best_sinr, prior, inst.powers, inst.noise))
        best_sinr = u;
      if (partial_slnr(u, prior, inst.powers, inst.noise) > partial_slnr(best_slnr, prior, inst.powers, inst.noise))
        best_slnr = u;
    }
    CHECK(sinr_successive_step(pool, prior, inst.powers, inst.noise) == best_sinr);
    CHECK(slnr_successive_step(pool, prior, inst.powers, inst.noise) == best_slnr);

    std::vector<Candidate> cands;
    for (const UeId u : pool) cands.push_back({u, inst.beams[u], inst.powers.at(u, u)});
    UeId best_snr = pool[0], best_lo = pool[0];
    auto lo = [&](UeId u) {
      double leak = 0.0;
      for (const Decision& d : prior) leak += inst.table.cross(2, inst.beams[u], d.bs, std::get<BeamIndex>(d.beam));
      return inst.table.own(2, inst.beams[u]) / (leak + inst.noise);
    };
    for (const UeId u : pool) {
      if (inst.powers.at(u, u) > inst.powers.at(best_snr, best_snr)) best_snr = u;
      if (lo(u) > lo(best_lo)) best_lo = u;
    }
    CHECK(uncoordinated_snr_step(cands) == best_snr);
    CHECK(low_overhead_step(2, cands, prior, inst.table, inst.noise) == best_lo);
    CHECK(low_overhead_step(2, cands, {}, inst.table, inst.noise) == best_snr);
  }
}

TEST_CASE("argmax steps ignore a common power scale") {
  RandomStream rng(31);
  for (int t = 0; t < 50; ++t) {
    Instance inst = random_instance(2, 5, rng);
    inst.noise = 0.0;
    const std::vector<Decision> prior{{0, 2, BeamIndex{inst.beams[2]}}};
    const UeId a = sinr_successive_step(inst.ues_by_bs[1], prior, inst.powers, 0.0);
    const UeId b = slnr_successive_step(inst.ues_by_bs[1], prior, inst.powers, 0.0);
    inst.powers.scale(37.5);
    CHECK(sinr_successive_step(inst.ues_by_bs[1], prior, inst.powers, 0.0) == a);
    CHECK(slnr_successive_step(inst.ues_by_bs[1], prior, inst.powers, 0.0) == b);
  }
}

TEST_CASE("ties go to the lowest UE index") {
  PowerMatrix p(4);
  for (UeId q = 0; q < 4; ++q)
    for (UeId u = 0; u < 4; ++u) p.set(q, u, q == u ? 5.0 : 1.0);
  const std::vector<UeId> pool{3, 1, 2};
  CHECK(sinr_successive_step(pool, {}, p, 1.0) == 1);
  CHECK(slnr_successive_step(pool, {}, p, 1.0) == 1);
  const std::vector<Candidate> cands{{3, 0, 2.0}, {2, 0, 2.0}};
  CHECK(uncoordinated_snr_step(cands) == 2);
}

TEST_CASE("average partial SLNR expands obfuscated sets into phantom UEs") {
  LeakageTable t(2, 4);
  for (BeamIndex e = 0; e < 4; ++e) {
    t.set_own(0, e, 8.0);
    t.set_own(1, e, 8.0);
    for (BeamIndex f = 0; f < 4; ++f) {
      t.set_cross(0, e, 1, f, double(f + 1));
      t.set_cross(1, e, 0, f, double(f + 1));
    }
  }
  const std::vector<Decision> single{{1, 0, BeamIndex{2}}};
  CHECK(average_partial_slnr(0, 1, single, t, 1.0) == doctest::Approx(8.0 / 4.0));
  const std::vector<Decision> set{{1, 0, ObfuscatedBeamSet({0, 2, 3}, 2)}};
  CHECK(average_partial_slnr(0, 1, set, t, 1.0) == doctest::Approx(8.0 / (1.0 + 3.0 + 4.0 + 1.0)));
  const std::vector<Candidate> cands{{5, 1, 1.0}};
  CHECK_THROWS_AS(low_overhead_step(0, cands, set, t, 1.0), Error);
  CHECK_THROWS_AS(robust_step(0, cands, single, t, 1.0), Error);
}

TEST_CASE("exhaustive schedule equals brute force and bounds successive policies") {
  RandomStream rng(4);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n_bs = 2 + rng.below(2);
    const std::size_t per_bs = n_bs == 2 ? 2 + rng.below(3) : 2 + rng.below(2);
    const Instance inst = random_instance(n_bs, per_bs, rng);
    const ExhaustiveResult ex =
        exhaustive_schedule(inst.ues_by_bs, inst.beams, inst.powers, inst.noise, per_bs);
    const double brute = oracle::brute_force_sum_rate(inst.ues_by_bs, inst.powers, inst.noise);
    CHECK(ex.sum_rate == brute);
    const FrameConfig cfg{per_bs, {}};
    for (const Policy& p : successive_policies()) {
      RandomStream prng(t);
      const double rate = run_frame(p, inst.input(), cfg, prng).sum_rate();
      CHECK(rate <= ex.sum_rate);
    }
    RandomStream unused(0);
    CHECK(run_frame({PolicyKind::kExhaustive, 0}, inst.input(), cfg, unused).sum_rate() ==
          doctest::Approx(ex.sum_rate));
  }
}

TEST_CASE("exhaustive schedule limits") {
  RandomStream rng(1);
  const Instance inst = random_instance(3, 8, rng);
  try {
    (void)exhaustive_schedule(inst.ues_by_bs, inst.beams, inst.powers, inst.noise, 8);
    FAIL("expected the budget to be exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudgetExceeded);
  }
  CHECK_THROWS_AS(exhaustive_schedule(inst.ues_by_bs, inst.beams, inst.powers, inst.noise, 9), Error);
}

TEST_CASE("every UE is scheduled exactly once per frame") {
  RandomStream rng(12);
  for (int t = 0; t < 30; ++t) {
    Instance inst = random_instance(3, 4, rng);
    inst.ues_by_bs[1].pop_back();  // fewer UEs than slots leaves idle slots
    for (const Policy& p : successive_policies()) {
      RandomStream prng(t);
      const FrameResult r = run_frame(p, inst.input(), FrameConfig{4, {2, 0, 1}}, prng);
      std::multiset<UeId> seen;
      for (std::size_t s = 0; s < r.schedule.slots.size(); ++s) {
        std::set<std::size_t> bss;
        for (const Decision& d : r.schedule.slots[s]) {
          seen.insert(d.ue);
          CHECK(bss.insert(d.bs).second);
          CHECK(std::find(inst.ues_by_bs[d.bs].begin(), inst.ues_by_bs[d.bs].end(), d.ue) !=
                inst.ues_by_bs[d.bs].end());
        }
        CHECK(r.sinr[s].size() == r.schedule.slots[s].size());
      }
      std::multiset<UeId> expect;
      for (const auto& ues : inst.ues_by_bs) expect.insert(ues.begin(), ues.end());
      CHECK(seen == expect);
    }
  }
}

TEST_CASE("run_frame is deterministic and validates its input") {
  RandomStream rng(77);
  const Instance inst = random_instance(2, 5, rng);
  const FrameConfig cfg{5, {}};
  for (const Policy& p : successive_policies()) {
    RandomStream a(9), b(9);
    const FrameResult x = run_frame(p, inst.input(), cfg, a);
    const FrameResult y = run_frame(p, inst.input(), cfg, b);
    CHECK(x.sinr == y.sinr);
  }
  RandomStream r(0);
  CHECK_THROWS_AS(run_frame({PolicyKind::kIdealSinr, 0}, inst.input(), FrameConfig{4, {}}, r), Error);
  CHECK_THROWS_AS(run_frame({PolicyKind::kIdealSinr, 0}, inst.input(), FrameConfig{5, {0, 0}}, r), Error);
  FrameInput no_table = inst.input();
  no_table.table = nullptr;
  CHECK_THROWS_AS(run_frame({PolicyKind::kLowOverhead, 0}, no_table, cfg, r), Error);
}

TEST_CASE("robust with K = 0 schedules like low overhead") {
  RandomStream rng(55);
  for (int t = 0; t < 40; ++t) {
    const Instance inst = random_instance(3, 4, rng);
    RandomStream a(t), b(t);
    const FrameResult lo = run_frame({PolicyKind::kLowOverhead, 0}, inst.input(), FrameConfig{4, {}}, a);
    const FrameResult rb = run_frame({PolicyKind::kRobust, 0}, inst.input(), FrameConfig{4, {}}, b);
    CHECK(lo.sinr == rb.sinr);
  }
}

TEST_CASE("policy names") {
  for (const PolicyKind k : {PolicyKind::kExhaustive, PolicyKind::kIdealSinr, PolicyKind::kIdealSlnr,
                             PolicyKind::kLowOverhead, PolicyKind::kRobust, PolicyKind::kUncoordinated}) {
    CHECK(parse_policy_kind(policy_name(k)) == k);
  }
  CHECK(policy_label({PolicyKind::kRobust, 3}) == "robust_k3");
  CHECK(policy_label({PolicyKind::kIdealSlnr, 0}) == "ideal_slnr");
  CHECK_THROWS_AS(parse_policy_kind("greedy"), Error);
}
