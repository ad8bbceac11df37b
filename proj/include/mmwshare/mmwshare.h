/* mmwshare: multi-operator mmWave spectrum-sharing simulator, C interface.
 *
 * All objects are opaque and owned by the caller once created; release them
 * with the matching *_free function (NULL is accepted). Every fallible call
 * returns an mmws_status; on failure mmws_last_error() describes the problem
 * for the calling thread until its next failing call. */
#ifndef MMWSHARE_H
#define MMWSHARE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MMWSHARE_BUILDING)
#    define MMWSHARE_API __declspec(dllexport)
#  else
#    define MMWSHARE_API __declspec(dllimport)
#  endif
#else
#  define MMWSHARE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmws_status {
  MMWS_OK = 0,
  MMWS_ERR_INVALID_ARGUMENT = 1,
  MMWS_ERR_DIMENSION = 2,
  MMWS_ERR_MISSING = 3,
  MMWS_ERR_BUDGET = 4,
  MMWS_ERR_PARSE = 5,
  MMWS_ERR_IO = 6,
  MMWS_ERR_INTERNAL = 7
} mmws_status;

typedef struct mmws_config mmws_config;
typedef struct mmws_context mmws_context;
typedef struct mmws_metrics mmws_metrics;

typedef struct mmws_policy_stats {
  char label[32]; /* e.g. "ideal_sinr", "robust_k3" */
  double mean_se;
  double half_width;
  double gain_pct;
  double gain_half_width;
} mmws_policy_stats;

MMWSHARE_API const char* mmws_version(void);
MMWSHARE_API const char* mmws_last_error(void);
MMWSHARE_API const char* mmws_status_name(mmws_status status);

/* Scenario configuration (flat dotted-key YAML, see README). */
MMWSHARE_API mmws_status mmws_config_default(mmws_config** out);
MMWSHARE_API mmws_status mmws_config_parse(const char* text, mmws_config** out);
MMWSHARE_API mmws_status mmws_config_load(const char* path, mmws_config** out);
MMWSHARE_API void mmws_config_free(mmws_config* config);
MMWSHARE_API mmws_status mmws_config_set_seed(mmws_config* config, uint64_t seed);
MMWSHARE_API mmws_status mmws_config_set_runs(mmws_config* config, size_t runs);
MMWSHARE_API mmws_status mmws_config_get_seed(const mmws_config* config, uint64_t* seed);
MMWSHARE_API mmws_status mmws_config_get_runs(const mmws_config* config, size_t* runs);
/* Writes the resolved config as text. `needed` receives the size including
 * the terminating NUL; pass capacity 0 to query it. */
MMWSHARE_API mmws_status mmws_config_serialize(const mmws_config* config, char* buffer, size_t capacity,
                                               size_t* needed);

/* Codebook, grid, footprints and leakage table of a config's geometry. */
MMWSHARE_API mmws_status mmws_context_create(const mmws_config* config, mmws_context** out);
MMWSHARE_API void mmws_context_free(mmws_context* context);
MMWSHARE_API size_t mmws_context_bs_count(const mmws_context* context);
MMWSHARE_API size_t mmws_context_beam_count(const mmws_context* context);
/* beam_number is one-based. */
MMWSHARE_API mmws_status mmws_context_footprint_area(const mmws_context* context, size_t bs, size_t beam_number,
                                                     double* area_m2);

/* Monte Carlo over the configured policies. */
MMWSHARE_API mmws_status mmws_monte_carlo(const mmws_config* config, const mmws_context* context, size_t workers,
                                          mmws_metrics** out);
MMWSHARE_API void mmws_metrics_free(mmws_metrics* metrics);
MMWSHARE_API size_t mmws_metrics_policy_count(const mmws_metrics* metrics);
MMWSHARE_API mmws_status mmws_metrics_policy(const mmws_metrics* metrics, size_t index, mmws_policy_stats* out);
MMWSHARE_API mmws_status mmws_metrics_privacy(const mmws_metrics* metrics, size_t dummies,
                                              double* detection_probability, double* equivocation_bits);

MMWSHARE_API mmws_status mmws_detection_probability(size_t dummies, const double* areas, size_t count,
                                                    double detection_area, double* out);

/* Runs a command (privacy-sweep, nlos-sweep, single-run, footprint-export,
 * oracle-check) and writes its CSV files and manifest.json into out_dir.
 * `passed` is 0 when oracle-check found a violation, 1 otherwise. */
MMWSHARE_API mmws_status mmws_run_experiment(const mmws_config* config, const char* command, const char* out_dir,
                                             size_t workers, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* MMWSHARE_H */
