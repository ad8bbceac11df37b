#include "mmwshare/experiment.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mmwshare/config.hpp"
#include "mmwshare/error.hpp"
#include "mmwshare/format.hpp"

namespace mmwshare {
namespace {

constexpr int kPrecision = 6;

std::string fx(double v) { return format_fixed(v, kPrecision); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace

std::string_view verb_name(Verb verb) {
  switch (verb) {
    case Verb::kPrivacySweep: return "privacy-sweep";
    case Verb::kNlosSweep: return "nlos-sweep";
    case Verb::kSingleRun: return "single-run";
    case Verb::kFootprintExport: return "footprint-export";
    case Verb::kOracleCheck: return "oracle-check";
  }
  return "?";
}

Verb parse_verb(std::string_view name) {
  for (const Verb v : {Verb::kPrivacySweep, Verb::kNlosSweep, Verb::kSingleRun, Verb::kFootprintExport,
                       Verb::kOracleCheck}) {
    if (verb_name(v) == name) return v;
  }
  fail(ErrorCode::kInvalidArgument, "unknown command '" + std::string(name) +
                                        "' (expected privacy-sweep, nlos-sweep, single-run, footprint-export or "
                                        "oracle-check)");
}

void write_provenance(std::ostream& out, Verb verb, const ScenarioConfig& config) {
  out << "# mmwshare " << kVersion << " " << verb_name(verb) << "\n";
  out << "# seed: " << config.seed << "\n";
  std::istringstream lines(serialize_config(config));
  for (std::string line; std::getline(lines, line);) out << "# " << line << "\n";
}

void write_privacy_csv(std::ostream& out, const ScenarioConfig& config, const PrivacySweep& sweep) {
  write_provenance(out, Verb::kPrivacySweep, config);
  out << "policy,baseline,k,detection_probability,equivocation_bits,mean_se,se_half_width,gain_pct,"
         "gain_half_width\n";
  for (const PrivacySweepRow& r : sweep.rows) {
    out << policy_label(r.policy) << "," << (r.baseline ? 1 : 0) << "," << r.dummies << ","
        << fx(r.detection_probability) << "," << fx(r.equivocation_bits) << "," << fx(r.mean_se) << ","
        << fx(r.half_width) << "," << fx(r.gain_pct) << "," << fx(r.gain_half_width) << "\n";
  }
}

void write_nlos_csv(std::ostream& out, const ScenarioConfig& config, std::span<const NlosSweepRow> rows) {
  write_provenance(out, Verb::kNlosSweep, config);
  out << "nlos_variance,k,detection_probability,robust_se,robust_half_width,uncoordinated_se,"
         "uncoordinated_half_width,gain_pct,gain_half_width\n";
  for (const NlosSweepRow& r : rows) {
    out << fx(r.nlos_variance) << "," << r.dummies << "," << fx(r.detection_probability) << "," << fx(r.robust_se)
        << "," << fx(r.robust_half_width) << "," << fx(r.uncoordinated_se) << "," << fx(r.uncoordinated_half_width)
        << "," << fx(r.gain_pct) << "," << fx(r.gain_half_width) << "\n";
  }
}

void write_single_run_csv(std::ostream& out, const ScenarioConfig& config, const RunMetrics& metrics) {
  write_provenance(out, Verb::kSingleRun, config);
  out << "policy,k,detection_probability,equivocation_bits,mean_se,se_half_width,gain_pct,gain_half_width\n";
  for (const PolicyMetrics& m : metrics.policies) {
    const std::size_t k = m.policy.kind == PolicyKind::kRobust ? m.policy.dummies : 0;
    double dp = 0.0;
    double eq = 0.0;
    for (const PrivacyPoint& p : metrics.privacy) {
      if (p.dummies == k) {
        dp = p.detection_probability;
        eq = p.equivocation_bits;
      }
    }
    out << policy_label(m.policy) << "," << k << "," << fx(dp) << "," << fx(eq) << "," << fx(m.mean_se) << ","
        << fx(m.half_width) << "," << fx(m.gain_pct) << "," << fx(m.gain_half_width) << "\n";
  }
}

OracleCheck oracle_check(const ScenarioConfig& config, const ScenarioContext& context, std::size_t instances) {
  ScenarioConfig tiny = config;
  tiny.ues_per_bs = 2;
  tiny.slots = 2;
  tiny.validate();
  const Policy successive[] = {{PolicyKind::kIdealSinr, 0},
                               {PolicyKind::kIdealSlnr, 0},
                               {PolicyKind::kLowOverhead, 0},
                               {PolicyKind::kRobust, 0},
                               {PolicyKind::kUncoordinated, 0}};
  OracleCheck out;
  for (std::size_t i = 0; i < instances; ++i) {
    RandomStream rng(run_seed(tiny.seed, i));
    RandomStream scenario_rng = rng.child(0);
    const ScenarioRealization s = generate_scenario(tiny, context, scenario_rng);
    const std::vector<BeamIndex> beams = s.serving_beams();
    FrameInput input = s.frame_input(tiny, context);
    input.beam_of_ue = beams;
    RandomStream unused = rng.child(1);

    OracleInstance inst;
    inst.exhaustive = run_frame(Policy{PolicyKind::kExhaustive, 0}, input, tiny.frame_config(), unused).sum_rate();
    bool ok = true;
    for (const Policy& p : successive) {
      RandomStream policy_rng = rng.child(1000);
      const double rate = run_frame(p, input, tiny.frame_config(), policy_rng).sum_rate();
      inst.successive.push_back(rate);
      if (rate > inst.exhaustive) ok = false;
    }
    if (!ok) ++out.violations;
    out.instances.push_back(std::move(inst));
  }
  return out;
}

ExperimentOutcome run_experiment(Verb verb, const ScenarioConfig& config, const std::filesystem::path& out_dir,
                                 std::size_t workers) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + out_dir.string() + "': " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  const ScenarioContext context = ScenarioContext::build(config);
  const double setup_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ExperimentOutcome outcome;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  std::ostringstream csv;
  std::string csv_name;

  switch (verb) {
    case Verb::kPrivacySweep: {
      const PrivacySweep sweep = sweep_privacy(config, context, config.k_values, workers);
      write_privacy_csv(csv, config, sweep);
      csv_name = "privacy_sweep.csv";
      const auto& lo = sweep.metrics.find(Policy{PolicyKind::kLowOverhead, 0});
      bool same = false;
      for (const PolicyMetrics& m : sweep.metrics.policies) {
        if (m.policy == Policy{PolicyKind::kRobust, 0}) same = m.per_run_se == lo.per_run_se;
      }
      extra["low_overhead_mean_se"] = lo.mean_se;
      extra["low_overhead_half_width"] = lo.half_width;
      if (std::find(config.k_values.begin(), config.k_values.end(), 0) != config.k_values.end()) {
        extra["low_overhead_equals_robust_k0"] = same;
      }
      outcome.summary = std::to_string(sweep.rows.size()) + " rows";
      break;
    }
    case Verb::kNlosSweep: {
      const std::vector<NlosSweepRow> rows = sweep_nlos(config, context, config.nlos_variances, workers);
      write_nlos_csv(csv, config, rows);
      csv_name = "nlos_sweep.csv";
      std::vector<double> x;
      std::vector<double> y;
      for (const NlosSweepRow& r : rows) {
        x.push_back(r.nlos_variance);
        y.push_back(r.gain_pct);
      }
      if (!rows.empty()) extra["dummies"] = rows.front().dummies;
      if (rows.size() >= 2) extra["gain_slope_pct_per_unit_variance"] = fitted_slope(x, y);
      outcome.summary = std::to_string(rows.size()) + " variance points";
      break;
    }
    case Verb::kSingleRun: {
      const std::vector<Policy> policies = configured_policies(config);
      const RunMetrics metrics = monte_carlo(config, context, policies, workers);
      write_single_run_csv(csv, config, metrics);
      csv_name = "single_run.csv";
      outcome.summary = std::to_string(metrics.policies.size()) + " policies";
      break;
    }
    case Verb::kFootprintExport: {
      write_provenance(csv, verb, config);
      csv << "bs,beam,area_m2,cells,main_gain,side_gain\n";
      for (std::size_t b = 0; b < context.atlas.bs_count(); ++b) {
        for (BeamIndex e = 0; e < context.atlas.beam_count(); ++e) {
          const Footprint& fp = context.atlas.footprint(b, e);
          const SectoredGains& g = context.atlas.gains(b, e);
          csv << b << "," << e + 1 << "," << fx(fp.area) << "," << fp.cells.size() << "," << fx(g.main_gain) << ","
              << fx(g.side_gain) << "\n";
        }
      }
      csv_name = "footprints.csv";
      for (const std::size_t number : config.export_beams) {
        for (std::size_t b = 0; b < context.atlas.bs_count(); ++b) {
          const GainMap map = gain_map(context.codebook, context.grid, b, number - 1);
          std::ostringstream grid_csv;
          write_provenance(grid_csv, verb, config);
          write_grid_csv(grid_csv, context.grid, map.gains, kPrecision);
          const std::string name = "gain_bs" + std::to_string(b) + "_beam" + std::to_string(number) + ".csv";
          write_file(out_dir / name, grid_csv.str());
          outcome.files.push_back(name);
        }
      }
      outcome.summary = std::to_string(context.atlas.bs_count() * context.atlas.beam_count()) + " footprints";
      break;
    }
    case Verb::kOracleCheck: {
      const OracleCheck check = oracle_check(config, context);
      write_provenance(csv, verb, config);
      csv << "instance,exhaustive,ideal_sinr,ideal_slnr,low_overhead,robust_k0,uncoordinated\n";
      for (std::size_t i = 0; i < check.instances.size(); ++i) {
        csv << i << "," << fx(check.instances[i].exhaustive);
        for (const double r : check.instances[i].successive) csv << "," << fx(r);
        csv << "\n";
      }
      csv_name = "oracle_check.csv";
      outcome.passed = check.violations == 0;
      extra["violations"] = check.violations;
      outcome.summary = std::to_string(check.instances.size()) + " instances, " + std::to_string(check.violations) +
                        " violations";
      break;
    }
  }

  write_file(out_dir / csv_name, csv.str());
  outcome.files.insert(outcome.files.begin(), csv_name);
  const double total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json manifest;
  manifest["tool"] = "mmwshare";
  manifest["version"] = kVersion;
  manifest["command"] = verb_name(verb);
  manifest["seed"] = config.seed;
  manifest["runs"] = config.runs;
  manifest["workers"] = workers;
  manifest["passed"] = outcome.passed;
  manifest["files"] = outcome.files;
  manifest["config_text"] = serialize_config(config);
  manifest["timings_s"] = {{"setup", setup_s}, {"total", total_s}};
  manifest["results"] = extra;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  outcome.files.push_back("manifest.json");
  return outcome;
}

}  // namespace mmwshare
