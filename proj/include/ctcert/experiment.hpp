#pragma once

#include "ctcert/certifier.hpp"
#include "ctcert/config.hpp"
#include "ctcert/transport.hpp"

#include <string>

namespace ctcert {

// Each run returns its machine output already serialized; identical inputs
// give byte-identical text.

struct CertifyRun {
  Certificate certificate;
  std::string json;
};
CertifyRun run_certify(const RunConfig& cfg);

struct VerifyRun {
  TransportReport report;
  bool pass = false;  // identity matching optimal and duality gap within tolerance
  std::string json;
  std::string csv;  // sample/image pairs
};
VerifyRun run_verify(const RunConfig& cfg);

struct FlowRun {
  FlowResult result;
  std::string csv;
};
FlowRun run_flow(const RunConfig& cfg);

struct CTransformRun {
  CTransformResult result;
  std::string json;
};
CTransformRun run_ctransform(const RunConfig& cfg);

struct RiccatiDemoOptions {
  double k = 0.0;
  double s0 = 0.0;
  double t_end = 1.0;
  int dim = 1;
  double step = 0.01;
};
// Rows t, eigenvalues of S_t (nan where det Gamma_2 vanishes), det Gamma_2
// from the explicit solution with S_0 = s0 I.
std::string riccati_demo_csv(const RiccatiDemoOptions& options);

std::string certificate_json(const Certificate& cert, const RunConfig* cfg = nullptr);

}  // namespace ctcert
