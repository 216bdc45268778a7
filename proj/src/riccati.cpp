#include "ctcert/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace ctcert {

namespace {

using Eigen::MatrixXd;

void require_symmetric(const MatrixXd& S, const char* what) {
  if (S.rows() != S.cols() || S.rows() == 0)
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " must be a non-empty square matrix");
  if (!S.allFinite()) throw Error(ErrorKind::kInvalidArgument, std::string(what) + " has non-finite entries");
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " is not symmetric");
}

// Ratio of the frame size to the smallest singular value of a.
double denominator_condition(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd stacked(2 * a.rows(), a.cols());
  stacked << a, b;
  Eigen::JacobiSVD<MatrixXd> sa(a);
  Eigen::JacobiSVD<MatrixXd> sab(stacked);
  double smin = sa.singularValues().minCoeff();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sab.singularValues().maxCoeff() / smin;
}

// sin(x t)/x and sinh(x t)/x with the x -> 0 limit t.
double sinc_t(double x, double t) { return x == 0.0 ? t : std::sin(x * t) / x; }
double sinhc_t(double x, double t) { return x == 0.0 ? t : std::sinh(x * t) / x; }

}  // namespace

RiccatiTrajectory riccati_integrate(const CurvatureSource& R, const MatrixXd& S0, double t_end, double step,
                                    const RiccatiOptions& options) {
  require_symmetric(S0, "initial matrix");
  if (!(t_end >= 0.0) || t_end > 1.0) throw Error(ErrorKind::kInvalidArgument, "Riccati horizon must lie in [0, 1]");
  if (!(step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "Riccati step must be positive");
  const Eigen::Index n = S0.rows();
  const int steps = t_end == 0.0 ? 0 : std::max(1, static_cast<int>(std::ceil(t_end / step - 1e-9)));
  const double h = steps > 0 ? t_end / steps : 0.0;

  MatrixXd a = MatrixXd::Identity(n, n), b = S0;
  RiccatiTrajectory traj;
  traj.times.push_back(0.0);
  traj.S.push_back(S0);
  traj.denominator_det.push_back(1.0);
  traj.min_gamma2_det = 1.0;

  auto rhs = [&](double t, const MatrixXd& aa, const MatrixXd& bb, MatrixXd& da, MatrixXd& db) {
    MatrixXd r = R(t);
    if (r.rows() != n || r.cols() != n)
      throw Error(ErrorKind::kInvalidArgument, "curvature source returned a matrix of the wrong size");
    da = bb;
    db = -aa * r;
  };

  double prev_det = 1.0;
  MatrixXd ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    rhs(t, a, b, ka1, kb1);
    rhs(t + 0.5 * h, a + 0.5 * h * ka1, b + 0.5 * h * kb1, ka2, kb2);
    rhs(t + 0.5 * h, a + 0.5 * h * ka2, b + 0.5 * h * kb2, ka3, kb3);
    rhs(t + h, a + h * ka3, b + h * kb3, ka4, kb4);
    a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    const double t_next = (i + 1) * h;

    double det = a.determinant();
    double cond = denominator_condition(a, b);
    traj.min_gamma2_det = std::min(traj.min_gamma2_det, det);

    std::optional<double> hit;
    if (prev_det > 0.0 && det <= 0.0) hit = t + h * prev_det / (prev_det - det);
    if (!(cond <= options.condition_limit) && !hit) hit = t_next;
    if (hit && !traj.blow_up) traj.blow_up = *hit;
    prev_det = det;

    if (traj.blow_up && options.stop_at_blow_up) break;
    traj.times.push_back(t_next);
    traj.denominator_det.push_back(det);
    if (cond <= options.condition_limit) {
      traj.S.push_back(a.partialPivLu().solve(b));
    } else {
      traj.S.push_back(MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN()));
    }
  }
  return traj;
}

GammaPair constant_gammas(double k, const MatrixXd& S0, double t) {
  require_symmetric(S0, "initial matrix");
  const Eigen::Index n = S0.rows();
  MatrixXd id = MatrixXd::Identity(n, n);
  double c = std::sqrt(std::abs(k));
  if (k < 0.0)
    return {std::cosh(c * t) * S0 + c * std::sinh(c * t) * id, sinhc_t(c, t) * S0 + std::cosh(c * t) * id};
  if (k == 0.0) return {S0, t * S0 + id};
  return {std::cos(c * t) * S0 - c * std::sin(c * t) * id, sinc_t(c, t) * S0 + std::cos(c * t) * id};
}

GammaPair block_gammas(double k, double grad_norm, const MatrixXd& S0, double t) {
  require_symmetric(S0, "initial matrix");
  if (!(grad_norm >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "gradient norm must be non-negative");
  const Eigen::Index n = S0.rows();
  MatrixXd id = MatrixXd::Identity(n, n);
  if (k == 0.0) return {S0, t * S0 + id};
  const double lambda = std::sqrt(std::abs(k)) * grad_norm;
  Eigen::VectorXd left(n), shift(n), right(n), diag(n);
  left(0) = 1.0;
  shift(0) = 0.0;
  right(0) = t;
  diag(0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (k < 0.0) {
      left(i) = std::cosh(lambda * t);
      shift(i) = lambda * std::sinh(lambda * t);
      right(i) = sinhc_t(lambda, t);
      diag(i) = std::cosh(lambda * t);
    } else {
      left(i) = std::cos(lambda * t);
      shift(i) = -lambda * std::sin(lambda * t);
      right(i) = sinc_t(lambda, t);
      diag(i) = std::cos(lambda * t);
    }
  }
  MatrixXd g1 = left.asDiagonal() * S0;
  g1 += MatrixXd(shift.asDiagonal());
  MatrixXd g2 = right.asDiagonal() * S0;
  g2 += MatrixXd(diag.asDiagonal());
  return {g1, g2};
}

namespace {

MatrixXd ratio(const GammaPair& g, double t) {
  double det = g.gamma2.determinant();
  if (det < 1e-12) {
    std::ostringstream os;
    os << "Gamma_2 is singular at t=" << t << " (det " << det << "): conjugate point";
    throw Error(ErrorKind::kSingular, os.str(), t);
  }
  // Gamma_1 Gamma_2^{-1} = (Gamma_2^{-T} Gamma_1^T)^T
  return g.gamma2.transpose().partialPivLu().solve(g.gamma1.transpose()).transpose();
}

}  // namespace

MatrixXd riccati_explicit_constant(double k, const MatrixXd& S0, double t) {
  return ratio(constant_gammas(k, S0, t), t);
}

MatrixXd riccati_explicit_block(double k, double grad_norm, const MatrixXd& S0, double t) {
  return ratio(block_gammas(k, grad_norm, S0, t), t);
}

ComparisonReport comparison_check(const RiccatiTrajectory& lower, const RiccatiTrajectory& upper, double slack) {
  if (lower.S.empty() || upper.S.empty()) throw Error(ErrorKind::kInvalidArgument, "empty trajectory");
  if (lower.S[0].rows() != upper.S[0].rows())
    throw Error(ErrorKind::kInvalidArgument, "trajectories have different dimensions");
  auto min_eig = [](const MatrixXd& d) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (d + d.transpose()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  };
  if (!(min_eig(upper.S[0] - lower.S[0]) > 0.0))
    throw Error(ErrorKind::kInvalidArgument, "comparison requires S1_0 < S2_0 strictly");

  ComparisonReport report;
  report.min_gap = std::numeric_limits<double>::infinity();
  const std::size_t count = std::min(lower.S.size(), upper.S.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(lower.times[i] - upper.times[i]) > 1e-12)
      throw Error(ErrorKind::kInvalidArgument, "trajectories are not on the same time grid");
    if (!lower.S[i].allFinite() || !upper.S[i].allFinite()) break;
    double gap = min_eig(upper.S[i] - lower.S[i]);
    ++report.samples_checked;
    if (gap < report.min_gap) {
      report.min_gap = gap;
      report.worst_time = lower.times[i];
    }
  }
  report.holds = report.min_gap > -slack;
  return report;
}

}  // namespace ctcert
