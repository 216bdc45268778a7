#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <random>

namespace testing_support {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Eigen::MatrixXd orthogonal(int n) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = uniform(-1.0, 1.0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  }

  // Q diag(spectrum) Q^T with eigenvalues uniform in (lo, hi).
  Eigen::MatrixXd symmetric(int n, double lo, double hi) {
    Eigen::MatrixXd q = orthogonal(n);
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = uniform(lo, hi);
    Eigen::MatrixXd s = q * d.asDiagonal() * q.transpose();
    return 0.5 * (s + s.transpose());
  }

 private:
  std::mt19937_64 engine_;
};

inline double sup_norm(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
