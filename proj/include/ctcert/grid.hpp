#pragma once

#include "ctcert/geometry.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ctcert {

struct SampleGrid {
  std::vector<ChartPoint> points;
  int resolution = 0;
  // Largest Riemannian spacing between neighbouring grid nodes.
  double spacing = 0.0;
  std::string description;
};

// Torus: resolution^n nodes i * P / resolution.
// Sphere: resolution latitude rings (cell centres) times 2 * resolution
// longitudes.
// Hyperbolic disk: square coordinate lattice clipped to |u| <= 0.85.
SampleGrid make_grid(const Manifold& model, int resolution);

// Uniform reals in [0, 1) built from raw mt19937_64 output, so sequences are
// identical across standard libraries.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

// Points uniformly distributed with respect to Riemannian volume.
std::vector<ChartPoint> sample_uniform(const Manifold& model, int count, std::uint64_t seed);

}  // namespace ctcert
