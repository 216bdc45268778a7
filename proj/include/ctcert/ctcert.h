#ifndef CTCERT_CTCERT_H
#define CTCERT_CTCERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CTC_BUILDING_LIBRARY)
#    define CTC_API __declspec(dllexport)
#  else
#    define CTC_API __declspec(dllimport)
#  endif
#else
#  define CTC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ctc_context ctc_context;

typedef enum ctc_status {
  CTC_OK = 0,
  CTC_INVALID_ARGUMENT = 1,
  CTC_DOMAIN = 2,
  CTC_ESCAPE = 3,
  CTC_NO_CONVERGENCE = 4,
  CTC_PRECONDITION = 5,
  CTC_SINGULAR = 6,
  CTC_ORACLE_UNRELIABLE = 7,
  CTC_NON_DIFFEOMORPHISM = 8,
  CTC_CONFIG = 9,
  CTC_INTERNAL = 10
} ctc_status;

/* Message of the last failed call on this thread ("" if none). */
CTC_API const char* ctc_last_error(void);
CTC_API const char* ctc_status_name(ctc_status status);

/* Strings returned through char** are owned by the caller. */
CTC_API void ctc_string_free(char* s);

CTC_API ctc_status ctc_context_create(const char* config_json, ctc_context** out);
CTC_API ctc_status ctc_context_load(const char* path, ctc_context** out);
CTC_API void ctc_context_destroy(ctc_context* ctx);

CTC_API ctc_status ctc_context_set_grid(ctc_context* ctx, int resolution);
CTC_API ctc_status ctc_context_set_ctransform_grid(ctc_context* ctx, int resolution);
CTC_API ctc_status ctc_context_set_seed(ctc_context* ctx, uint64_t seed);
/* Borrowed pointer, valid until the context is destroyed. */
CTC_API const char* ctc_context_output_dir(const ctc_context* ctx);

/* *pass is 1 on pass, 0 on fail. */
CTC_API ctc_status ctc_certify(ctc_context* ctx, int* pass, char** certificate_json);
CTC_API ctc_status ctc_verify(ctc_context* ctx, int* pass, char** report_json, char** pairs_csv);
CTC_API ctc_status ctc_flow(ctc_context* ctx, double* energy_drift, char** csv);
CTC_API ctc_status ctc_ctransform(ctc_context* ctx, int* c_convex, char** result_json);

CTC_API ctc_status ctc_riccati_demo(double k, double s0, double t_end, int dim, double step, char** csv);

CTC_API ctc_status ctc_threshold_xi(double lambda, int sign_k, double* out);
/* s0 and out are n x n, column-major. */
CTC_API ctc_status ctc_riccati_explicit(double k, const double* s0, int n, double t, double* out);
/* cost is n x n row-major; permutation[i] is the column matched to row i. */
CTC_API ctc_status ctc_assignment(const double* cost, int n, int* permutation, double* value);

#ifdef __cplusplus
}
#endif

#endif
