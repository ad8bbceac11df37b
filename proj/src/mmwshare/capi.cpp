#include "mmwshare/mmwshare.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "mmwshare/config.hpp"
#include "mmwshare/error.hpp"
#include "mmwshare/experiment.hpp"
#include "mmwshare/harness.hpp"
#include "mmwshare/privacy.hpp"

struct mmws_config {
  mmwshare::ScenarioConfig value;
};

struct mmws_context {
  mmwshare::ScenarioContext value;
};

struct mmws_metrics {
  mmwshare::RunMetrics value;
};

namespace {

thread_local std::string g_last_error;

mmws_status to_status(mmwshare::ErrorCode code) {
  switch (code) {
    case mmwshare::ErrorCode::kInvalidArgument: return MMWS_ERR_INVALID_ARGUMENT;
    case mmwshare::ErrorCode::kDimensionMismatch: return MMWS_ERR_DIMENSION;
    case mmwshare::ErrorCode::kMissingEntry: return MMWS_ERR_MISSING;
    case mmwshare::ErrorCode::kBudgetExceeded: return MMWS_ERR_BUDGET;
    case mmwshare::ErrorCode::kParse: return MMWS_ERR_PARSE;
    case mmwshare::ErrorCode::kIo: return MMWS_ERR_IO;
  }
  return MMWS_ERR_INTERNAL;
}

mmws_status failed(mmws_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
mmws_status guarded(F&& body) {
  try {
    body();
    return MMWS_OK;
  } catch (const mmwshare::Error& e) {
    return failed(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return failed(MMWS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return failed(MMWS_ERR_INTERNAL, e.what());
  } catch (...) {
    return failed(MMWS_ERR_INTERNAL, "unknown error");
  }
}

#define MMWS_REQUIRE_ARG(cond, what) \
  if (!(cond)) return failed(MMWS_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* mmws_version(void) { return mmwshare::kVersion.data(); }

const char* mmws_last_error(void) { return g_last_error.c_str(); }

const char* mmws_status_name(mmws_status status) {
  switch (status) {
    case MMWS_OK: return "ok";
    case MMWS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MMWS_ERR_DIMENSION: return "dimension mismatch";
    case MMWS_ERR_MISSING: return "missing entry";
    case MMWS_ERR_BUDGET: return "budget exceeded";
    case MMWS_ERR_PARSE: return "parse error";
    case MMWS_ERR_IO: return "i/o error";
    case MMWS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

mmws_status mmws_config_default(mmws_config** out) {
  MMWS_REQUIRE_ARG(out != nullptr, "mmws_config_default: out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new mmws_config{}; });
}

mmws_status mmws_config_parse(const char* text, mmws_config** out) {
  MMWS_REQUIRE_ARG(text != nullptr && out != nullptr, "mmws_config_parse: NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new mmws_config{mmwshare::parse_config(text)}; });
}

mmws_status mmws_config_load(const char* path, mmws_config** out) {
  MMWS_REQUIRE_ARG(path != nullptr && out != nullptr, "mmws_config_load: NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new mmws_config{mmwshare::load_config(path)}; });
}

void mmws_config_free(mmws_config* config) { delete config; }

mmws_status mmws_config_set_seed(mmws_config* config, uint64_t seed) {
  MMWS_REQUIRE_ARG(config != nullptr, "mmws_config_set_seed: config is NULL");
  config->value.seed = seed;
  return MMWS_OK;
}

mmws_status mmws_config_set_runs(mmws_config* config, size_t runs) {
  MMWS_REQUIRE_ARG(config != nullptr, "mmws_config_set_runs: config is NULL");
  MMWS_REQUIRE_ARG(runs >= 1, "mmws_config_set_runs: runs must be >= 1");
  config->value.runs = runs;
  return MMWS_OK;
}

mmws_status mmws_config_get_seed(const mmws_config* config, uint64_t* seed) {
  MMWS_REQUIRE_ARG(config != nullptr && seed != nullptr, "mmws_config_get_seed: NULL argument");
  *seed = config->value.seed;
  return MMWS_OK;
}

mmws_status mmws_config_get_runs(const mmws_config* config, size_t* runs) {
  MMWS_REQUIRE_ARG(config != nullptr && runs != nullptr, "mmws_config_get_runs: NULL argument");
  *runs = config->value.runs;
  return MMWS_OK;
}

mmws_status mmws_config_serialize(const mmws_config* config, char* buffer, size_t capacity, size_t* needed) {
  MMWS_REQUIRE_ARG(config != nullptr, "mmws_config_serialize: config is NULL");
  MMWS_REQUIRE_ARG(buffer != nullptr || capacity == 0, "mmws_config_serialize: buffer is NULL");
  return guarded([&] {
    const std::string text = mmwshare::serialize_config(config->value);
    if (needed != nullptr) *needed = text.size() + 1;
    if (capacity == 0) return;
    if (capacity < text.size() + 1) {
      mmwshare::fail(mmwshare::ErrorCode::kInvalidArgument, "mmws_config_serialize: buffer too small");
    }
    std::memcpy(buffer, text.c_str(), text.size() + 1);
  });
}

mmws_status mmws_context_create(const mmws_config* config, mmws_context** out) {
  MMWS_REQUIRE_ARG(config != nullptr && out != nullptr, "mmws_context_create: NULL argument");
  *out = nullptr;
  return guarded([&] { *out = new mmws_context{mmwshare::ScenarioContext::build(config->value)}; });
}

void mmws_context_free(mmws_context* context) { delete context; }

size_t mmws_context_bs_count(const mmws_context* context) {
  return context == nullptr ? 0 : context->value.atlas.bs_count();
}

size_t mmws_context_beam_count(const mmws_context* context) {
  return context == nullptr ? 0 : context->value.atlas.beam_count();
}

mmws_status mmws_context_footprint_area(const mmws_context* context, size_t bs, size_t beam_number, double* area_m2) {
  MMWS_REQUIRE_ARG(context != nullptr && area_m2 != nullptr, "mmws_context_footprint_area: NULL argument");
  MMWS_REQUIRE_ARG(beam_number >= 1, "mmws_context_footprint_area: beam numbers start at 1");
  return guarded([&] { *area_m2 = context->value.atlas.area(bs, beam_number - 1); });
}

mmws_status mmws_monte_carlo(const mmws_config* config, const mmws_context* context, size_t workers,
                             mmws_metrics** out) {
  MMWS_REQUIRE_ARG(config != nullptr && context != nullptr && out != nullptr, "mmws_monte_carlo: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const auto policies = mmwshare::configured_policies(config->value);
    *out = new mmws_metrics{mmwshare::monte_carlo(config->value, context->value, policies, workers)};
  });
}

void mmws_metrics_free(mmws_metrics* metrics) { delete metrics; }

size_t mmws_metrics_policy_count(const mmws_metrics* metrics) {
  return metrics == nullptr ? 0 : metrics->value.policies.size();
}

mmws_status mmws_metrics_policy(const mmws_metrics* metrics, size_t index, mmws_policy_stats* out) {
  MMWS_REQUIRE_ARG(metrics != nullptr && out != nullptr, "mmws_metrics_policy: NULL argument");
  if (index >= metrics->value.policies.size()) return failed(MMWS_ERR_MISSING, "mmws_metrics_policy: no such policy");
  const auto& m = metrics->value.policies[index];
  *out = mmws_policy_stats{};
  const std::string label = mmwshare::policy_label(m.policy);
  std::strncpy(out->label, label.c_str(), sizeof(out->label) - 1);
  out->mean_se = m.mean_se;
  out->half_width = m.half_width;
  out->gain_pct = m.gain_pct;
  out->gain_half_width = m.gain_half_width;
  return MMWS_OK;
}

mmws_status mmws_metrics_privacy(const mmws_metrics* metrics, size_t dummies, double* detection_probability,
                                 double* equivocation_bits) {
  MMWS_REQUIRE_ARG(metrics != nullptr, "mmws_metrics_privacy: metrics is NULL");
  return guarded([&] {
    const auto& p = metrics->value.privacy_at(dummies);
    if (detection_probability != nullptr) *detection_probability = p.detection_probability;
    if (equivocation_bits != nullptr) *equivocation_bits = p.equivocation_bits;
  });
}

mmws_status mmws_detection_probability(size_t dummies, const double* areas, size_t count, double detection_area,
                                       double* out) {
  MMWS_REQUIRE_ARG(out != nullptr && (areas != nullptr || count == 0), "mmws_detection_probability: NULL argument");
  return guarded([&] {
    *out = mmwshare::detection_probability(dummies, std::span<const double>(areas, count), detection_area);
  });
}

mmws_status mmws_run_experiment(const mmws_config* config, const char* command, const char* out_dir, size_t workers,
                                int* passed) {
  MMWS_REQUIRE_ARG(config != nullptr && command != nullptr && out_dir != nullptr,
                   "mmws_run_experiment: NULL argument");
  MMWS_REQUIRE_ARG(workers >= 1, "mmws_run_experiment: workers must be >= 1");
  return guarded([&] {
    const auto outcome =
        mmwshare::run_experiment(mmwshare::parse_verb(command), config->value, out_dir, workers);
    if (passed != nullptr) *passed = outcome.passed ? 1 : 0;
  });
}

}  // extern "C"
