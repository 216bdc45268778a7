#pragma once

#include "ctcert/grid.hpp"
#include "ctcert/mechanics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ctcert {

enum class Theorem { General, Natural, Riemannian, TwoDim };

const char* to_string(Theorem theorem);

struct CertifyOptions {
  double delta = 1e-9;
  // Curvature constant used by the Riemannian and 2d conditions; defaults to
  // the model's curvature.
  std::optional<double> k;
};

struct Certificate {
  Theorem theorem = Theorem::General;
  double k = 0.0;
  std::string grid;
  std::size_t points_checked = 0;
  bool pass = false;
  // Smallest per-point margin; -infinity when some point has no finite margin.
  double worst_margin = 0.0;
  ChartPoint worst_point;
  std::vector<std::string> caveats;
  double delta = 1e-9;
};

// S_ij = <Hess f(v_i), v_j> for the frame columns v_i.
Matrix hessian_in_frame(const MechanicalSystem& sys, const ScalarField& f, const ChartPoint& x,
                        const Matrix& frame);

// lambda coth(lambda), 1 or lambda cot(lambda) by the sign of k.
double threshold_xi(double lambda, int sign_k);

// Hess f > -xi(sqrt|k|) I with k the Hessian bound of the potential.
Certificate certify_natural(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                            const CertifyOptions& options = {});
// S > -diag(1, xi(lambda) I) in the frame adapted to grad f.
Certificate certify_riemannian(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                               const CertifyOptions& options = {});
// Surface conditions on det and trace of S + diag(1, xi).
Certificate certify_2d(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                       const CertifyOptions& options = {});
// Hess f > -xi(sqrt|k|) I with a user-supplied bound R <= k I, which is
// checked at the states df_x.
Certificate certify_general(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid, double k,
                            const CertifyOptions& options = {});

}  // namespace ctcert
