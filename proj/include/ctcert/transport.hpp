#pragma once

#include "ctcert/assignment.hpp"
#include "ctcert/grid.hpp"
#include "ctcert/mechanics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctcert {

struct MapImage {
  std::optional<ChartPoint> image;
  std::string error;  // set when the flow failed for this point
};

// phi(x) = pi(phi_1(df_x)).
std::vector<MapImage> build_map(const MechanicalSystem& sys, const ScalarField& f,
                                const std::vector<ChartPoint>& points, double step = 1e-3);

struct CTransformResult {
  std::string grid;
  std::vector<ChartPoint> points;
  std::vector<double> f;
  std::vector<double> f_c;
  std::vector<double> f_cc;
  double max_defect = 0.0;  // sup |f - f^cc|
  std::size_t worst_index = 0;
  double spacing = 0.0;
  double hessian_bound = 0.0;  // max |Hess f| over the grid
  double tol_grid = 0.0;       // 10 (hessian_bound + 1) spacing^2
  bool c_convex = false;
  std::size_t failed_pairs = 0;
};

// Brute-force f^c and f^cc over all grid pairs. More than 1% of cost
// evaluations failing raises an oracle-unreliable error.
CTransformResult c_transform(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                             const CostOptions& options = {});

struct Characteristic {
  ChartPoint base;
  CotangentState end;
  // f_t(end.x) = f(base) + action of the arc
  double value = 0.0;
  // d(pi phi_t) applied to the graph of df, base chart to end chart.
  Matrix jacobian;
  // Smallest oriented Jacobian determinant seen on [0, t].
  double min_jacobian_det = 1.0;
};

// No crossing check; flow errors propagate.
std::vector<Characteristic> characteristics(const MechanicalSystem& sys, const ScalarField& f, double t,
                                            const std::vector<ChartPoint>& points, double step = 1e-3);

struct PotentialSamples {
  double t = 0.0;
  std::vector<ChartPoint> points;  // phi_t(base_points)
  std::vector<double> values;      // f_t there
  std::vector<Vector> covectors;   // flowed covectors
};

// Throws a non-diffeomorphism error when the characteristics fold
// (oriented Jacobian determinant reaches 0) or two of them land on the same
// point with different values.
PotentialSamples evolve_potential(const MechanicalSystem& sys, const ScalarField& f, double t,
                                  const std::vector<ChartPoint>& base_points, double step = 1e-3);

struct HJOptions {
  double spatial_step = 1e-4;
  double time_step = 1e-3;
  double flow_step = 1e-3;
};

struct HJValidation {
  double covector_error = 0.0;  // max |reconstructed df_t - flowed covector|
  double hj_residual = 0.0;     // max |d_t f_t + H(x, df_t)|
  ChartPoint worst_covector_point;
  ChartPoint worst_residual_point;
  std::size_t samples = 0;
};

// (i) df_t from central differences of f_t across neighbouring
// characteristics; (ii) d_t f_t by central differences in time at fixed
// points, found by Newton inversion of phi_{t +- tau}.
HJValidation validate_hamilton_jacobi(const MechanicalSystem& sys, const ScalarField& f, double t,
                                      const std::vector<ChartPoint>& base_points, const HJOptions& options = {});

struct TransportReport {
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<ChartPoint> sample_points;
  std::vector<ChartPoint> images;
  std::vector<int> permutation;
  double monge_cost = 0.0;       // mean c(x_i, phi(x_i))
  double assignment_cost = 0.0;  // mean cost of the optimal matching
  double optimality_gap = 0.0;   // monge_cost - assignment_cost
  bool assignment_is_identity = false;
  double duality_gap = 0.0;
  std::optional<bool> certified;
};

struct VerifyOptions {
  double step = 1e-3;
  CostOptions cost;
};

TransportReport verify_optimality(const MechanicalSystem& sys, const ScalarField& f, int samples,
                                  std::uint64_t seed, const VerifyOptions& options = {});

}  // namespace ctcert
