#pragma once

#include "ctcert/field.hpp"
#include "ctcert/geometry.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace ctcert {

// Natural mechanical system L = |v|^2/2 - U, H = |p|^2/2 + U.
struct MechanicalSystem {
  Manifold model;
  ScalarField potential;
  // Least k with Hess U <= k I (declared, or the grid maximum of the top
  // eigenvalue of the Hessian operator).
  double hess_bound = 0.0;
  bool hess_bound_declared = false;
  // Upper bound for U from the same grid, used to prune shooting targets.
  double potential_max = 0.0;
};

double estimate_hessian_bound(const Manifold& model, const ScalarField& potential, int resolution = 64);

MechanicalSystem make_system(Manifold model, ScalarField potential,
                             std::optional<double> declared_hess_bound = std::nullopt,
                             int estimate_resolution = 64);

struct CotangentState {
  ChartPoint x;
  Vector p;
};

double hamiltonian(const MechanicalSystem& sys, const CotangentState& state);

// Phase velocity [dH/dp; -dH/dx].
Vector hamiltonian_vector_field(const MechanicalSystem& sys, const CotangentState& state);

// Derivative of the phase velocity with respect to [x; p].
Matrix hamiltonian_jacobian(const MechanicalSystem& sys, const CotangentState& state);

struct FlowResult {
  std::vector<double> times;
  std::vector<CotangentState> states;
  double energy_drift = 0.0;
  double step = 0.0;
};

// Classical RK4 with fixed step (adjusted down so it divides t_end).
// Torus coordinates are wrapped and sphere charts switched between steps.
// Leaving the truncated disk throws an escape error carrying the exit time.
FlowResult flow(const MechanicalSystem& sys, const CotangentState& state0, double t_end, double step);

// RK4 for the flow together with a block of phase vectors (columns) carried
// along it. The rhs receives the current state, the Hamiltonian Jacobian
// there, and the block. Columns are re-expressed on chart switches.
using AuxRhs = std::function<WideMatrix(double t, const CotangentState& state, const Matrix& dv,
                                        const WideMatrix& aux)>;

struct AugmentedSample {
  double t = 0.0;
  CotangentState state;
  WideMatrix aux;
  // Product of orientation signs of the chart changes so far.
  int orientation = 1;
};

struct AugmentedResult {
  std::vector<AugmentedSample> samples;
  // Set when some column norm exceeded the blow-up threshold; integration
  // stops there.
  std::optional<double> blow_up;
};

AugmentedResult integrate_augmented(const MechanicalSystem& sys, const CotangentState& state0,
                                    const WideMatrix& aux0, double t_end, double step,
                                    const AuxRhs& rhs,
                                    double blow_up_norm = std::numeric_limits<double>::infinity());

// Linearized flow: columns of `tangent0` pushed forward by d(phi_t).
AugmentedResult flow_with_tangent(const MechanicalSystem& sys, const CotangentState& state0,
                                  const WideMatrix& tangent0, double t_end, double step);

struct CurveSample {
  ChartPoint x;
  Vector velocity;
};

// Composite Simpson quadrature (3/8 rule on the tail for odd counts) of L
// along uniformly spaced samples on [0, duration].
double action(const MechanicalSystem& sys, const std::vector<CurveSample>& curve, double duration = 1.0);

std::vector<CurveSample> curve_from_flow(const MechanicalSystem& sys, const FlowResult& result);

struct CostOptions {
  double step = 2e-3;
  int max_newton = 50;
  double tolerance = 1e-10;      // Newton target
  double accept_residual = 1e-8; // required at exit
};

struct ShootingResult {
  double cost = 0.0;
  Vector initial_covector;
  double residual = 0.0;
  int iterations = 0;
};

// Newton shooting on the initial covector for the unit-time extremal from x
// to y, started from the free geodesic through log_x(y). On the torus with a
// potential the nearest lift of y and its neighbours are all tried and the
// least action wins.
ShootingResult shoot(const MechanicalSystem& sys, const ChartPoint& x, const ChartPoint& y,
                     const CostOptions& options = {});

// Two-point cost. Closed form distance^2/2 for U == 0, shooting otherwise.
double cost(const MechanicalSystem& sys, const ChartPoint& x, const ChartPoint& y,
            const CostOptions& options = {});

}  // namespace ctcert
