#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mmwshare/mmwshare.h"

static int failures = 0;

#define EXPECT(cond)                                                \
  do {                                                              \
    if (!(cond)) {                                                  \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                   \
    }                                                               \
  } while (0)

static void test_config(void) {
  mmws_config* cfg = NULL;
  EXPECT(mmws_config_default(&cfg) == MMWS_OK);
  uint64_t seed = 0;
  size_t runs = 0;
  EXPECT(mmws_config_get_seed(cfg, &seed) == MMWS_OK && seed == 1);
  EXPECT(mmws_config_get_runs(cfg, &runs) == MMWS_OK && runs == 1000);
  EXPECT(mmws_config_set_runs(cfg, 0) == MMWS_ERR_INVALID_ARGUMENT);
  EXPECT(mmws_config_set_seed(cfg, 99) == MMWS_OK);

  size_t needed = 0;
  EXPECT(mmws_config_serialize(cfg, NULL, 0, &needed) == MMWS_OK && needed > 1);
  char* text = malloc(needed);
  EXPECT(mmws_config_serialize(cfg, text, needed, &needed) == MMWS_OK);
  EXPECT(strlen(text) + 1 == needed);
  EXPECT(strstr(text, "mc.seed: 99\n") != NULL);
  char small[4];
  EXPECT(mmws_config_serialize(cfg, small, sizeof small, &needed) == MMWS_ERR_INVALID_ARGUMENT);

  mmws_config* back = NULL;
  EXPECT(mmws_config_parse(text, &back) == MMWS_OK);
  EXPECT(mmws_config_get_seed(back, &seed) == MMWS_OK && seed == 99);
  mmws_config_free(back);
  free(text);
  mmws_config_free(cfg);

  mmws_config* bad = NULL;
  EXPECT(mmws_config_parse("ues_per_bs: 0\n", &bad) == MMWS_ERR_PARSE);
  EXPECT(bad == NULL);
  EXPECT(strstr(mmws_last_error(), "ues_per_bs") != NULL);
  EXPECT(mmws_config_load("does/not/exist.yaml", &bad) == MMWS_ERR_IO);
  EXPECT(mmws_config_default(NULL) == MMWS_ERR_INVALID_ARGUMENT);
  mmws_config_free(NULL);
}

static void test_run(void) {
  mmws_config* cfg = NULL;
  EXPECT(mmws_config_parse("array.horizontal: 8\narray.vertical: 4\nmc.runs: 3\nprivacy.k_values: [0, 3]\n", &cfg) ==
         MMWS_OK);
  mmws_context* ctx = NULL;
  EXPECT(mmws_context_create(cfg, &ctx) == MMWS_OK);
  EXPECT(mmws_context_bs_count(ctx) == 2);
  EXPECT(mmws_context_beam_count(ctx) == 32);
  double area = -1.0;
  EXPECT(mmws_context_footprint_area(ctx, 0, 1, &area) == MMWS_OK && area >= 0.0);
  EXPECT(mmws_context_footprint_area(ctx, 0, 0, &area) == MMWS_ERR_INVALID_ARGUMENT);
  EXPECT(mmws_context_footprint_area(ctx, 2, 1, &area) == MMWS_ERR_INVALID_ARGUMENT);

  mmws_metrics* m = NULL;
  EXPECT(mmws_monte_carlo(cfg, ctx, 2, &m) == MMWS_OK);
  const size_t n = mmws_metrics_policy_count(m);
  EXPECT(n == 6);
  int saw_uncoordinated = 0;
  for (size_t i = 0; i < n; ++i) {
    mmws_policy_stats s;
    EXPECT(mmws_metrics_policy(m, i, &s) == MMWS_OK);
    EXPECT(s.mean_se > 0.0 && isfinite(s.half_width));
    if (strcmp(s.label, "uncoordinated") == 0) {
      saw_uncoordinated = 1;
      EXPECT(s.gain_pct == 0.0);
    }
  }
  EXPECT(saw_uncoordinated);
  mmws_policy_stats s;
  EXPECT(mmws_metrics_policy(m, n, &s) == MMWS_ERR_MISSING);
  double dp = 0.0, eq = 0.0;
  EXPECT(mmws_metrics_privacy(m, 3, &dp, &eq) == MMWS_OK && dp > 0.0 && dp <= 1.0);
  EXPECT(mmws_metrics_privacy(m, 5, &dp, &eq) == MMWS_ERR_MISSING);
  mmws_metrics_free(m);
  mmws_context_free(ctx);

  int passed = 0;
  EXPECT(mmws_run_experiment(cfg, "oracle-check", "capi_out", 1, &passed) == MMWS_OK && passed == 1);
  EXPECT(mmws_run_experiment(cfg, "bogus", "capi_out", 1, &passed) == MMWS_ERR_INVALID_ARGUMENT);
  mmws_config_free(cfg);
}

static void test_misc(void) {
  EXPECT(strcmp(mmws_version(), "0.1.0") == 0);
  EXPECT(strcmp(mmws_status_name(MMWS_ERR_MISSING), "missing entry") == 0);
  const double areas[] = {100.0, 40.0};
  double dp = 0.0;
  EXPECT(mmws_detection_probability(0, areas, 2, 10.0, &dp) == MMWS_OK && fabs(dp - 0.175) < 1e-15);
  EXPECT(mmws_detection_probability(0, areas, 0, 10.0, &dp) == MMWS_ERR_INVALID_ARGUMENT);
}

int main(void) {
  test_config();
  test_run();
  test_misc();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
