// mmwshare command-line front end; talks to the simulator only through the
// C interface.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mmwshare/mmwshare.h"

namespace {

int report(mmws_status status) {
  std::fprintf(stderr, "mmwshare: %s (%s)\n", mmws_last_error(), mmws_status_name(status));
  return status == MMWS_ERR_PARSE || status == MMWS_ERR_INVALID_ARGUMENT ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-operator mmWave spectrum-sharing simulator"};
  std::string command;
  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::size_t workers = 1;
  bool print_config = false;

  app.add_option("command", command, "privacy-sweep | nlos-sweep | single-run | footprint-export | oracle-check")
      ->required()
      ->check(CLI::IsMember({"privacy-sweep", "nlos-sweep", "single-run", "footprint-export", "oracle-check"}));
  app.add_option("--config", config_path, "Scenario file (flat dotted-key YAML)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides mc.seed)");
  auto* runs_opt = app.add_option("--runs", runs, "Monte Carlo runs (overrides mc.runs)")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--print-config", print_config, "Print the resolved config and exit");
  app.add_flag_function(
      "--version", [](std::int64_t) {
        std::printf("mmwshare %s\n", mmws_version());
        std::exit(0);
      },
      "Print the version and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share exit code 2 with bad config files
    return app.exit(e) == 0 ? 0 : 2;
  }

  mmws_config* config = nullptr;
  mmws_status st = config_path.empty() ? mmws_config_default(&config) : mmws_config_load(config_path.c_str(), &config);
  if (st != MMWS_OK) return report(st);
  if (*seed_opt) mmws_config_set_seed(config, seed);
  if (*runs_opt) mmws_config_set_runs(config, runs);

  if (print_config) {
    std::size_t needed = 0;
    mmws_config_serialize(config, nullptr, 0, &needed);
    std::string text(needed, '\0');
    mmws_config_serialize(config, text.data(), text.size(), &needed);
    std::fputs(text.c_str(), stdout);
    mmws_config_free(config);
    return 0;
  }

  int passed = 1;
  st = mmws_run_experiment(config, command.c_str(), out_dir.c_str(), workers, &passed);
  mmws_config_free(config);
  if (st != MMWS_OK) return report(st);
  std::fprintf(stderr, "mmwshare: %s done, results in %s\n", command.c_str(), out_dir.c_str());
  if (!passed) {
    std::fprintf(stderr, "mmwshare: %s reported a failure\n", command.c_str());
    return 3;
  }
  return 0;
}
