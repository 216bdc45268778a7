#pragma once

#include "ctcert/mechanics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ctcert {

// Phase vectors are stored as [dx; dp] in the chart of the base state.

struct SplittingData {
  CotangentState base;
  Matrix c;  // c_ij, horizontal lift of v is sum_i v_i (d_xi + sum_j c_ij d_pj)
};

// c_ij = sum_k Gamma^k_ij p_k
SplittingData structure_constants(const MechanicalSystem& sys, const CotangentState& state);

using HamiltonianFn = std::function<double(const Vector& x, const Vector& p)>;

// Structure constants of an arbitrary fibrewise convex Hamiltonian from the
// identity
//   2 H_pp c H_pp = H_pk H_pipjxk - H_xk H_pipjpk - H_pixk H_pkpj - H_pipk H_xkpj
// with all derivatives taken by nested fourth-order central differences.
struct DifferenceSteps {
  double x = 2e-3;
  double p = 0.1;
};
Matrix structure_constants_general(const HamiltonianFn& H, const Vector& x, const Vector& p,
                                   const DifferenceSteps& steps = {});
Matrix structure_constants_general(const MechanicalSystem& sys, const CotangentState& state,
                                   const DifferenceSteps& steps = {});

Vector horizontal_lift(const MechanicalSystem& sys, const CotangentState& state, const Vector& v);
// Vertical lift of the covector I(v) = g v.
Vector vertical_lift(const MechanicalSystem& sys, const CotangentState& state, const Vector& v);

// omega = sum dp_i ^ dx_i
double symplectic_form(const Vector& a, const Vector& b);
Matrix symplectic_matrix(int n);

// R(u, v)u + Hess U(v) with u = g^{-1} p.
Vector curvature_operator(const MechanicalSystem& sys, const CotangentState& state, const Vector& v);
// Matrix of the operator above in coordinates (column k = image of e_k).
Matrix curvature_operator_matrix(const MechanicalSystem& sys, const CotangentState& state);

// Orthonormal frame with the first vector along g^{-1} p; any orthonormal
// frame when p = 0.
Matrix adapted_frame(const MechanicalSystem& sys, const CotangentState& state);

struct FramePropagation {
  std::vector<double> times;
  std::vector<CotangentState> states;
  // Canonical frame at the initial point: e^i(t), f^i(t) as columns.
  std::vector<WideMatrix> E;
  std::vector<WideMatrix> F;
  // Tangent vectors v^i(t) at states[k] with d(phi_t) e^i(t) = (I v^i(t))^ver.
  std::vector<Matrix> transported;
  // d(phi_t) from the initial chart to the chart of states[k].
  std::vector<Matrix> tangent_map;
  std::optional<double> blow_up;
};

// Integrates e' = -f, f' = R(t) e through the pushed-forward frame
// E^ = d(phi_t) e, F^ = d(phi_t) f, which obey
//   E^' = DV E^ - F^,   F^' = DV F^ + R^H E^
// along the extremal, with e^i(0) = (I v_i)^ver and f^i(0) = v_i^hor.
// Integration stops with `blow_up` set once a column norm exceeds 1e12.
FramePropagation propagate_canonical_frame(const MechanicalSystem& sys, const CotangentState& state0,
                                           const Matrix& frame0, double t_end, double step = 1e-3);

struct CurvatureMatrix {
  double t = 0.0;
  Matrix entries;
};

// Entries <R(u_t, v^i) u_t + Hess U(v^i), v^j> at phi_t(state0).
CurvatureMatrix curvature_matrix_at(const MechanicalSystem& sys, const FramePropagation& frames, std::size_t k);
CurvatureMatrix curvature_matrix_along_extremal(const MechanicalSystem& sys, const CotangentState& state0,
                                                const Matrix& frame0, double t, double step = 1e-3);

// First t in (0, t_max] where the Jacobi fields d(pi) d(phi_t) e^i(0) become
// linearly dependent, located by a sign change of their oriented
// determinant.
std::optional<double> conjugate_time(const MechanicalSystem& sys, const CotangentState& state0,
                                     const Matrix& frame0, double t_max, double step = 1e-3);

}  // namespace ctcert
