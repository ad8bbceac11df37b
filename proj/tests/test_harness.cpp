#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "mmwshare/error.hpp"
#include "mmwshare/harness.hpp"
#include "oracles.hpp"

using namespace mmwshare;

namespace {
ScenarioConfig small_config(std::size_t runs) {
  ScenarioConfig c;
  c.runs = runs;
  c.seed = 42;
  return c;
}
}  // namespace

TEST_CASE("nearest BS association") {
  const std::vector<Position> sites{{10, 10, 5}, {30, 10, 5}, {20, 30, 8}};
  RandomStream rng(2);
  std::vector<Position> ues;
  for (int i = 0; i < 500; ++i) ues.push_back({rng.uniform(0, 40), rng.uniform(0, 40), 0});
  CHECK(nearest_bs(ues, sites) == oracle::nearest_scan(ues, sites));

  const std::vector<Position> colocated{{5, 5, 3}, {5, 5, 3}};
  const auto assoc = nearest_bs(ues, colocated);
  CHECK(std::all_of(assoc.begin(), assoc.end(), [](std::size_t b) { return b == 0; }));
  CHECK_THROWS_AS(nearest_bs(ues, std::vector<Position>{}), Error);
}

TEST_CASE("rebalancing moves the farthest UEs to the nearest BS with room") {
  const std::vector<Position> sites{{0, 0, 1}, {10, 0, 1}};
  const std::vector<Position> ues{{1, 0, 0}, {2, 0, 0}, {4, 0, 0}, {9, 0, 0}};
  std::vector<std::size_t> assoc{0, 0, 0, 1};
  rebalance_association(assoc, ues, sites, 2);
  CHECK(assoc == std::vector<std::size_t>{0, 0, 1, 1});

  RandomStream rng(6);
  const std::vector<Position> three{{10, 10, 5}, {12, 10, 5}, {40, 40, 5}};
  for (int t = 0; t < 50; ++t) {
    std::vector<Position> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform(0, 50), rng.uniform(0, 50), 0});
    std::vector<std::size_t> a = nearest_bs(pts, three);
    rebalance_association(a, pts, three, 4);
    std::vector<std::size_t> load(3, 0);
    for (const auto b : a) ++load[b];
    CHECK(load == std::vector<std::size_t>{4, 4, 4});
  }
  std::vector<std::size_t> full{0, 0, 0, 0};
  CHECK_THROWS_AS(rebalance_association(full, ues, sites, 1), Error);
}

TEST_CASE("generated scenario") {
  const ScenarioConfig config;
  const auto& ctx = default_context();
  RandomStream rng(13);
  const ScenarioRealization s = generate_scenario(config, ctx, rng);
  REQUIRE(s.ues.size() == 20);
  for (const auto& ues : s.ues_by_bs) CHECK(ues.size() == 10);
  for (UeId u = 0; u < 20; ++u) {
    const auto& ue = s.ues[u];
    CHECK(ue.position.x >= 0.0);
    CHECK(ue.position.x <= 50.0);
    CHECK(ue.beam == best_beam(s.channel(ue.bs, u), ctx.codebook));
    for (UeId q = 0; q < 20; ++q) {
      CHECK(s.powers.at(q, u) == received_power(s.channel(s.ues[q].bs, u), ctx.codebook.beam(s.ues[q].beam)));
    }
  }
  CHECK(s.noise == doctest::Approx(std::pow(10.0, -11.4)));

  RandomStream again(13);
  const ScenarioRealization t = generate_scenario(config, ctx, again);
  CHECK(t.serving_beams() == s.serving_beams());
}

TEST_CASE("pure LOS link without shadowing") {
  ScenarioConfig config;
  config.los.shadow_sigma_db = 0.0;
  config.nlos.shadow_sigma_db = 0.0;
  const auto& ctx = default_context();
  RandomStream rng(1);
  const std::vector<Position> pos{{20.0, 30.0, 0.0}, {40.0, 10.0, 0.0}};
  const ScenarioRealization s = realize_links(config, ctx, pos, {0, 1}, rng);
  for (UeId u = 0; u < 2; ++u) {
    const Direction dir = direction_between(config.bs_positions[u], pos[u]);
    const auto a = steering_vector(config.array, dir.azimuth, dir.elevation);
    const auto& h = s.channel(u, u).coefficients;
    double h2 = 0.0;
    for (const Complex c : h) h2 += std::norm(c);
    // a single LOS path leaves the channel along the steering vector
    CHECK(std::norm(inner_product(a, h)) == doctest::Approx(h2).epsilon(1e-9));
    CHECK(s.powers.at(u, u) ==
          doctest::Approx(h2 * std::norm(inner_product(a, ctx.codebook.beam(s.ues[u].beam)))).epsilon(1e-9));
  }
}

TEST_CASE("per-UE spectral efficiency") {
  ScenarioRealization s;
  s.ues.resize(3);
  s.powers = PowerMatrix(3);
  s.noise = 1.0;
  for (UeId q = 0; q < 3; ++q)
    for (UeId u = 0; u < 3; ++u) s.powers.set(q, u, q == u ? 3.0 : 1.0);
  ScheduleState sched;
  sched.slots = {{{0, 0, BeamIndex{0}}, {1, 1, BeamIndex{0}}}, {{0, 2, BeamIndex{0}}}};
  const auto se = evaluate_schedule(sched, s);
  CHECK(se[0] == doctest::Approx(std::log2(1.0 + 1.5)));
  CHECK(se[1] == doctest::Approx(std::log2(1.0 + 1.5)));
  CHECK(se[2] == doctest::Approx(2.0));
  sched.slots.pop_back();
  CHECK_THROWS_AS(evaluate_schedule(sched, s), Error);
}

TEST_CASE("run seeds") {
  CHECK(run_seed(1, 0) == derive_seed(1, 0));
  CHECK(run_seed(1, 5) != run_seed(1, 6));
  CHECK(run_seed(1, 5) != run_seed(2, 5));
}

TEST_CASE("single-run metrics") {
  const auto& ctx = default_context();
  const ScenarioConfig config = small_config(1);
  const Policy policies[] = {{PolicyKind::kIdealSinr, 0}};
  const RunMetrics m = monte_carlo(config, ctx, policies);
  CHECK(m.runs == 1);
  CHECK(m.policies.size() == 2);
  const auto& s = m.find(policies[0]);
  REQUIRE(s.per_run_se.size() == 1);
  CHECK(s.mean_se == s.per_run_se[0]);
  CHECK(s.half_width == 0.0);
  const auto& u = m.find(Policy{PolicyKind::kUncoordinated, 0});
  CHECK(u.gain_pct == 0.0);
  CHECK(s.gain_pct == doctest::Approx((s.mean_se / u.mean_se - 1.0) * 100.0));
  CHECK_THROWS_AS(m.find(Policy{PolicyKind::kRobust, 4}), Error);
}

TEST_CASE("Monte Carlo results do not depend on the worker count") {
  const auto& ctx = default_context();
  const ScenarioConfig config = small_config(12);
  const std::vector<Policy> policies = configured_policies(config);
  const RunMetrics one = monte_carlo(config, ctx, policies, 1);
  for (const std::size_t w : {2u, 3u, 5u, 16u}) {
    const RunMetrics many = monte_carlo(config, ctx, policies, w);
    REQUIRE(many.policies.size() == one.policies.size());
    for (std::size_t i = 0; i < one.policies.size(); ++i) {
      CHECK(many.policies[i].per_run_se == one.policies[i].per_run_se);
      CHECK(many.policies[i].mean_se == one.policies[i].mean_se);
      CHECK(many.policies[i].half_width == one.policies[i].half_width);
    }
  }

  const auto& lo = one.find(Policy{PolicyKind::kLowOverhead, 0});
  const auto& r0 = one.find(Policy{PolicyKind::kRobust, 0});
  CHECK(lo.per_run_se == r0.per_run_se);

  // half width from the per-run spread
  double mean = 0.0, ss = 0.0;
  for (const double x : lo.per_run_se) mean += x / 12.0;
  for (const double x : lo.per_run_se) ss += (x - mean) * (x - mean);
  CHECK(lo.half_width == doctest::Approx(1.96 * std::sqrt(ss / 11.0) / std::sqrt(12.0)));
}

TEST_CASE("configured policies expand robust over K") {
  ScenarioConfig config;
  config.policies = {PolicyKind::kRobust, PolicyKind::kIdealSinr};
  config.k_values = {0, 2};
  const auto ps = configured_policies(config);
  REQUIRE(ps.size() == 3);
  CHECK(ps[0] == Policy{PolicyKind::kRobust, 0});
  CHECK(ps[1] == Policy{PolicyKind::kRobust, 2});
  CHECK(ps[2] == Policy{PolicyKind::kIdealSinr, 0});
}

TEST_CASE("privacy sweep rows") {
  const auto& ctx = default_context();
  const ScenarioConfig config = small_config(6);
  const std::vector<std::size_t> ks{0, 1, 3, 7};
  const PrivacySweep sweep = sweep_privacy(config, ctx, ks);
  REQUIRE(sweep.rows.size() == 7);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(sweep.rows[i].policy == Policy{PolicyKind::kRobust, ks[i]});
    CHECK_FALSE(sweep.rows[i].baseline);
  }
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(sweep.rows[i].detection_probability < sweep.rows[i - 1].detection_probability);
    CHECK(sweep.rows[i].equivocation_bits > sweep.rows[i - 1].equivocation_bits);
  }
  for (std::size_t i = 4; i < 7; ++i) {
    CHECK(sweep.rows[i].baseline);
    CHECK(sweep.rows[i].dummies == 0);
    CHECK(sweep.rows[i].detection_probability == sweep.rows[0].detection_probability);
  }
  CHECK(sweep.rows[6].policy.kind == PolicyKind::kUncoordinated);
  CHECK_NOTHROW((void)sweep.metrics.find(Policy{PolicyKind::kLowOverhead, 0}));
}

TEST_CASE("dummy count selection") {
  const auto& ctx = default_context();
  ScenarioConfig config = small_config(10);
  const auto areas = realized_los_areas(config, ctx);
  CHECK(areas.size() == 10 * 20);
  CHECK(realized_los_areas(config, ctx, 4) == areas);
  const std::size_t k = select_dummy_count(config, ctx);
  const double dp = detection_probability(k, areas, config.detection_area);
  for (std::size_t other = 0; other < 128; ++other) {
    CHECK(std::abs(detection_probability(other, areas, config.detection_area) - config.target_dp) >=
          std::abs(dp - config.target_dp));
  }
  CHECK(geometric_detection_probability(config, ctx, 3) < geometric_detection_probability(config, ctx, 0));
}

TEST_CASE("NLOS sweep") {
  const auto& ctx = default_context();
  ScenarioConfig config = small_config(4);
  const std::vector<double> vs{0.0, 0.5, 1.0};
  const auto rows = sweep_nlos(config, ctx, vs);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rows[i].nlos_variance == vs[i]);
    CHECK(rows[i].dummies == rows[0].dummies);
    CHECK(rows[i].gain_pct == doctest::Approx((rows[i].robust_se / rows[i].uncoordinated_se - 1.0) * 100.0));
  }
  const std::vector<double> bad{1.5};
  CHECK_THROWS_AS(sweep_nlos(config, ctx, bad), Error);
}

TEST_CASE("config validation") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  c.nlos_variance = 1.2;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ScenarioConfig{};
  c.slots = 5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ScenarioConfig{};
  c.k_values = {128};
  CHECK_THROWS_AS(c.validate(), Error);
  c = ScenarioConfig{};
  c.bs_count = 3;
  c.bs_positions.clear();
  c.bs_operator = {0, 1, 0};
  c.place_sites_evenly();
  CHECK(c.bs_positions.size() == 3);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("fitted slope") {
  const std::vector<double> x{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> y;
  for (const double v : x) y.push_back(3.0 - 2.5 * v);
  CHECK(fitted_slope(x, y) == doctest::Approx(-2.5));
  const std::vector<double> flat{1.0, 1.0};
  CHECK_THROWS_AS(fitted_slope(flat, flat), Error);
}
