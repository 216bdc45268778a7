#pragma once

#include "ctcert/field.hpp"
#include "ctcert/geometry.hpp"
#include "ctcert/mechanics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctcert {

struct FieldSpec {
  std::string expr = "zero";
  double amplitude = 0.0;
};

// Run configuration, read from strict JSON:
//
//   manifold:     kind (flat_torus | sphere | hyperbolic), periods, radius, scale
//   system:       potential {expr, amplitude}, hess_bound
//   field:        expr, amplitude
//   grid:         resolution
//   flow:         step, t_end, x0, p0, chart
//   certify:      theorem (auto | natural | riemannian | 2d | general), k, delta
//   verification: samples, seed, duality_tol, ctransform_grid
//   output:       dir
//
// Only `manifold.kind` is required.
struct RunConfig {
  std::string manifold = "flat_torus";
  std::vector<double> periods{1.0};
  double radius = 1.0;
  double scale = 1.0;

  FieldSpec potential;
  std::optional<double> hess_bound;
  FieldSpec field;

  int grid_resolution = 64;

  double flow_step = 1e-3;
  double flow_t_end = 1.0;
  std::vector<double> flow_x0;
  std::vector<double> flow_p0;
  int flow_chart = 0;

  std::string theorem = "auto";
  std::optional<double> k;
  double delta = 1e-9;

  int samples = 100;
  std::uint64_t seed = 1;
  double duality_tol = 1e-6;
  int ctransform_grid = 256;

  std::string output_dir = ".";
};

// Throws a config error with line:column on malformed or unknown input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Manifold build_manifold(const RunConfig& cfg);
MechanicalSystem build_system(const RunConfig& cfg);
ScalarField build_field(const RunConfig& cfg, const Manifold& model);

}  // namespace ctcert
