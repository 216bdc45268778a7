#include "ctcert/ctcert.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void scalar_functions(void) {
  double xi = 0.0;
  EXPECT(ctc_threshold_xi(1.0, -1, &xi) == CTC_OK);
  EXPECT(fabs(xi - 1.0 / tanh(1.0)) < 1e-14);
  EXPECT(ctc_threshold_xi(4.0, 1, &xi) == CTC_DOMAIN);
  EXPECT(strlen(ctc_last_error()) > 0);
  EXPECT(ctc_threshold_xi(1.0, 1, NULL) == CTC_INVALID_ARGUMENT);

  double s0[4] = {0.0, 0.0, 0.0, 0.0}, out[4];
  EXPECT(ctc_riccati_explicit(-1.0, s0, 2, 1.0, out) == CTC_OK);
  EXPECT(fabs(out[0] - tanh(1.0)) < 1e-14 && fabs(out[3] - tanh(1.0)) < 1e-14);
  EXPECT(fabs(out[1]) < 1e-15 && fabs(out[2]) < 1e-15);
  double blow = -1.0 / tanh(1.0);
  EXPECT(ctc_riccati_explicit(-1.0, &blow, 1, 1.0, out) == CTC_SINGULAR);

  double cost[9] = {1, 2, 3, 2, 4, 6, 3, 6, 9};
  int perm[3];
  double value = 0.0;
  EXPECT(ctc_assignment(cost, 3, perm, &value) == CTC_OK);
  EXPECT(value == 10.0);
  EXPECT(perm[0] == 2 && perm[1] == 1 && perm[2] == 0);
  cost[4] = NAN;
  EXPECT(ctc_assignment(cost, 3, perm, &value) == CTC_INVALID_ARGUMENT);

  EXPECT(strcmp(ctc_status_name(CTC_CONFIG), "config error") == 0);
}

static void contexts(void) {
  ctc_context* ctx = NULL;
  EXPECT(ctc_context_create("{\"grid\": {}}", &ctx) == CTC_CONFIG);
  EXPECT(ctx == NULL);
  EXPECT(strstr(ctc_last_error(), "manifold") != NULL);

  const char* cfg =
      "{\"manifold\": {\"kind\": \"flat_torus\", \"periods\": [1.0]},"
      " \"field\": {\"expr\": \"cos1\", \"amplitude\": 0.01},"
      " \"grid\": {\"resolution\": 32}, \"verification\": {\"samples\": 10}}";
  EXPECT(ctc_context_create(cfg, &ctx) == CTC_OK);
  EXPECT(ctx != NULL);
  EXPECT(strcmp(ctc_context_output_dir(ctx), ".") == 0);

  int pass = -1;
  char* json = NULL;
  EXPECT(ctc_certify(ctx, &pass, &json) == CTC_OK);
  EXPECT(pass == 1);
  EXPECT(json != NULL && strstr(json, "\"verdict\": \"pass\"") != NULL);
  ctc_string_free(json);

  EXPECT(ctc_context_set_grid(ctx, 1) == CTC_INVALID_ARGUMENT);
  EXPECT(ctc_context_set_seed(ctx, 99) == CTC_OK);
  char* report = NULL;
  char* csv = NULL;
  EXPECT(ctc_verify(ctx, &pass, &report, &csv) == CTC_OK);
  EXPECT(pass == 1);
  EXPECT(report != NULL && strstr(report, "\"seed\": 99") != NULL);
  EXPECT(csv != NULL && strncmp(csv, "i,x_chart", 9) == 0);
  ctc_string_free(report);
  ctc_string_free(csv);

  double drift = -1.0;
  EXPECT(ctc_flow(ctx, &drift, &csv) == CTC_OK);
  EXPECT(drift >= 0.0 && drift < 1e-8);
  ctc_string_free(csv);

  EXPECT(ctc_certify(NULL, &pass, &json) == CTC_INVALID_ARGUMENT);
  ctc_context_destroy(ctx);
  ctc_context_destroy(NULL);

  EXPECT(ctc_context_load("/nonexistent.json", &ctx) == CTC_CONFIG);
}

static void demo(void) {
  char* csv = NULL;
  EXPECT(ctc_riccati_demo(1.0, 0.0, 1.0, 1, 0.5, &csv) == CTC_OK);
  EXPECT(csv != NULL && strncmp(csv, "t,s1,det_gamma2\n0,0,1\n", 22) == 0);
  ctc_string_free(csv);
  EXPECT(ctc_riccati_demo(1.0, 0.0, 1.0, 9, 0.5, &csv) == CTC_INVALID_ARGUMENT);
}

int main(void) {
  scalar_functions();
  contexts();
  demo();
  if (failures) {
    fprintf(stderr, "%d C API checks failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
