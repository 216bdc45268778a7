#pragma once

#include "ctcert/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace ctcert {

// Solution samples of S' + S^2 + R(t) = 0.
struct RiccatiTrajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> S;
  // det of the denominator a_t in S_t = a_t^{-1} b_t, per sample.
  std::vector<double> denominator_det;
  std::optional<double> blow_up;
  double min_gamma2_det = 1.0;
};

using CurvatureSource = std::function<Eigen::MatrixXd(double t)>;

struct RiccatiOptions {
  double condition_limit = 1e12;
  // Keep integrating the linear system after a blow-up; S is then NaN at
  // samples where a_t is too ill-conditioned to invert.
  bool stop_at_blow_up = true;
};

// RK4 on the linear system a' = b, b' = -a R(t), a_0 = I, b_0 = S0, with
// S = a^{-1} b. A blow-up is flagged when ||[a; b]|| ||a^{-1}|| exceeds the
// condition limit or det a changes sign between samples (time then located
// by linear interpolation of det a).
RiccatiTrajectory riccati_integrate(const CurvatureSource& R, const Eigen::MatrixXd& S0, double t_end,
                                    double step, const RiccatiOptions& options = {});

struct GammaPair {
  Eigen::MatrixXd gamma1;
  Eigen::MatrixXd gamma2;
};

// Gamma_1, Gamma_2 for the constant coefficient equation S' + S^2 + k I = 0.
GammaPair constant_gammas(double k, const Eigen::MatrixXd& S0, double t);
// Same with coefficient diag(0, k |grad f|^2 I): the first coordinate is free.
GammaPair block_gammas(double k, double grad_norm, const Eigen::MatrixXd& S0, double t);

// Gamma_1 Gamma_2^{-1}; throws a singular error when det Gamma_2 < 1e-12.
Eigen::MatrixXd riccati_explicit_constant(double k, const Eigen::MatrixXd& S0, double t);
Eigen::MatrixXd riccati_explicit_block(double k, double grad_norm, const Eigen::MatrixXd& S0, double t);

struct ComparisonReport {
  bool holds = true;
  double min_gap = 0.0;        // smallest eigenvalue of S2 - S1 seen
  double worst_time = 0.0;
  std::size_t samples_checked = 0;
};

// Checks S1_t <= S2_t (up to 1e-9 eigenvalue slack) on the common samples
// before either trajectory blows up. Requires S1_0 < S2_0 strictly.
ComparisonReport comparison_check(const RiccatiTrajectory& lower, const RiccatiTrajectory& upper,
                                  double slack = 1e-9);

}  // namespace ctcert
