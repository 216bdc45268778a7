#include "ctcert/ctcert.h"

#include "ctcert/assignment.hpp"
#include "ctcert/certifier.hpp"
#include "ctcert/experiment.hpp"
#include "ctcert/riccati.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct ctc_context {
  ctcert::RunConfig config;
};

namespace {

thread_local std::string last_error;

ctc_status status_of(ctcert::ErrorKind kind) {
  using ctcert::ErrorKind;
  switch (kind) {
    case ErrorKind::kInvalidArgument: return CTC_INVALID_ARGUMENT;
    case ErrorKind::kDomain: return CTC_DOMAIN;
    case ErrorKind::kEscape: return CTC_ESCAPE;
    case ErrorKind::kNoConvergence: return CTC_NO_CONVERGENCE;
    case ErrorKind::kPrecondition: return CTC_PRECONDITION;
    case ErrorKind::kSingular: return CTC_SINGULAR;
    case ErrorKind::kOracleUnreliable: return CTC_ORACLE_UNRELIABLE;
    case ErrorKind::kNonDiffeomorphism: return CTC_NON_DIFFEOMORPHISM;
    case ErrorKind::kConfig: return CTC_CONFIG;
  }
  return CTC_INTERNAL;
}

template <typename Fn>
ctc_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return CTC_OK;
  } catch (const ctcert::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return CTC_INTERNAL;
}

ctc_status null_argument(const char* what) {
  last_error = std::string(what) + " is null";
  return CTC_INVALID_ARGUMENT;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* ctc_last_error(void) { return last_error.c_str(); }

const char* ctc_status_name(ctc_status status) {
  switch (status) {
    case CTC_OK: return "ok";
    case CTC_INVALID_ARGUMENT: return "invalid argument";
    case CTC_DOMAIN: return "out of domain";
    case CTC_ESCAPE: return "chart escape";
    case CTC_NO_CONVERGENCE: return "no convergence";
    case CTC_PRECONDITION: return "precondition violated";
    case CTC_SINGULAR: return "singular";
    case CTC_ORACLE_UNRELIABLE: return "oracle unreliable";
    case CTC_NON_DIFFEOMORPHISM: return "non-diffeomorphism";
    case CTC_CONFIG: return "config error";
    case CTC_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ctc_string_free(char* s) { std::free(s); }

ctc_status ctc_context_create(const char* config_json, ctc_context** out) {
  if (!config_json) return null_argument("config_json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new ctc_context{ctcert::parse_config(config_json)}; });
}

ctc_status ctc_context_load(const char* path, ctc_context** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new ctc_context{ctcert::load_config(path)}; });
}

void ctc_context_destroy(ctc_context* ctx) { delete ctx; }

ctc_status ctc_context_set_grid(ctc_context* ctx, int resolution) {
  if (!ctx) return null_argument("ctx");
  if (resolution < 2 || resolution > 4096) {
    last_error = "grid resolution must lie in [2, 4096]";
    return CTC_INVALID_ARGUMENT;
  }
  ctx->config.grid_resolution = resolution;
  return CTC_OK;
}

ctc_status ctc_context_set_ctransform_grid(ctc_context* ctx, int resolution) {
  if (!ctx) return null_argument("ctx");
  if (resolution < 16) {
    last_error = "c-transform grid resolution must be >= 16";
    return CTC_INVALID_ARGUMENT;
  }
  ctx->config.ctransform_grid = resolution;
  return CTC_OK;
}

ctc_status ctc_context_set_seed(ctc_context* ctx, uint64_t seed) {
  if (!ctx) return null_argument("ctx");
  ctx->config.seed = seed;
  return CTC_OK;
}

const char* ctc_context_output_dir(const ctc_context* ctx) { return ctx ? ctx->config.output_dir.c_str() : ""; }

ctc_status ctc_certify(ctc_context* ctx, int* pass, char** certificate_json) {
  if (!ctx) return null_argument("ctx");
  return guarded([&] {
    ctcert::CertifyRun run = ctcert::run_certify(ctx->config);
    if (pass) *pass = run.certificate.pass ? 1 : 0;
    if (certificate_json) *certificate_json = duplicate(run.json);
  });
}

ctc_status ctc_verify(ctc_context* ctx, int* pass, char** report_json, char** pairs_csv) {
  if (!ctx) return null_argument("ctx");
  return guarded([&] {
    ctcert::VerifyRun run = ctcert::run_verify(ctx->config);
    if (pass) *pass = run.pass ? 1 : 0;
    char* json = report_json ? duplicate(run.json) : nullptr;
    try {
      if (pairs_csv) *pairs_csv = duplicate(run.csv);
    } catch (...) {
      std::free(json);
      throw;
    }
    if (report_json) *report_json = json;
  });
}

ctc_status ctc_flow(ctc_context* ctx, double* energy_drift, char** csv) {
  if (!ctx) return null_argument("ctx");
  return guarded([&] {
    ctcert::FlowRun run = ctcert::run_flow(ctx->config);
    if (energy_drift) *energy_drift = run.result.energy_drift;
    if (csv) *csv = duplicate(run.csv);
  });
}

ctc_status ctc_ctransform(ctc_context* ctx, int* c_convex, char** result_json) {
  if (!ctx) return null_argument("ctx");
  return guarded([&] {
    ctcert::CTransformRun run = ctcert::run_ctransform(ctx->config);
    if (c_convex) *c_convex = run.result.c_convex ? 1 : 0;
    if (result_json) *result_json = duplicate(run.json);
  });
}

ctc_status ctc_riccati_demo(double k, double s0, double t_end, int dim, double step, char** csv) {
  if (!csv) return null_argument("csv");
  return guarded([&] { *csv = duplicate(ctcert::riccati_demo_csv({k, s0, t_end, dim, step})); });
}

ctc_status ctc_threshold_xi(double lambda, int sign_k, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = ctcert::threshold_xi(lambda, sign_k); });
}

ctc_status ctc_riccati_explicit(double k, const double* s0, int n, double t, double* out) {
  if (!s0) return null_argument("s0");
  if (!out) return null_argument("out");
  if (n < 1) {
    last_error = "n must be positive";
    return CTC_INVALID_ARGUMENT;
  }
  return guarded([&] {
    Eigen::MatrixXd s = Eigen::Map<const Eigen::MatrixXd>(s0, n, n);
    Eigen::Map<Eigen::MatrixXd>(out, n, n) = ctcert::riccati_explicit_constant(k, s, t);
  });
}

ctc_status ctc_assignment(const double* cost, int n, int* permutation, double* value) {
  if (!cost) return null_argument("cost");
  if (n < 0) {
    last_error = "n must be non-negative";
    return CTC_INVALID_ARGUMENT;
  }
  return guarded([&] {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::MatrixXd c = Eigen::Map<const RowMajor>(cost, n, n);
    ctcert::Assignment a = ctcert::assignment_oracle(c);
    if (permutation)
      for (int i = 0; i < n; ++i) permutation[i] = a.permutation[i];
    if (value) *value = a.value;
  });
}

}  // extern "C"
