#include "ctcert/certifier.hpp"

#include "ctcert/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ctcert {

const char* to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::General: return "general";
    case Theorem::Natural: return "natural";
    case Theorem::Riemannian: return "riemannian";
    case Theorem::TwoDim: return "2d";
  }
  return "unknown";
}

Matrix hessian_in_frame(const MechanicalSystem& sys, const ScalarField& f, const ChartPoint& x, const Matrix& frame) {
  Matrix h = f.covariant_hessian(sys.model, x);
  Matrix s = frame.transpose() * h * frame;
  return 0.5 * (s + s.transpose());
}

double threshold_xi(double lambda, int sign_k) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::kInvalidArgument, "lambda must be finite and non-negative");
  if (sign_k == 0) return 1.0;
  if (sign_k != 1 && sign_k != -1) throw Error(ErrorKind::kInvalidArgument, "sign of k must be -1, 0 or 1");
  const double l2 = lambda * lambda;
  // Below one ulp of 1 the series term is dropped instead of rounded up, so
  // |xi - 1| never exceeds the series bound.
  const double ulp = std::numeric_limits<double>::epsilon();
  if (sign_k < 0) {
    if (lambda < 1e-4) {
      double d = l2 / 3.0 - l2 * l2 / 45.0;
      return d < ulp ? 1.0 : 1.0 + d;
    }
    return lambda / std::tanh(lambda);
  }
  if (lambda >= std::numbers::pi) {
    std::ostringstream os;
    os << "lambda = " << lambda << " >= pi: lambda cot(lambda) is undefined past the first pole";
    throw Error(ErrorKind::kDomain, os.str());
  }
  if (lambda < 1e-4) {
    double d = l2 / 3.0 + l2 * l2 / 45.0;
    return d < 0.5 * ulp ? 1.0 : 1.0 - d;
  }
  return lambda / std::tan(lambda);
}

namespace {

int sign_of(double k) { return k > 0.0 ? 1 : (k < 0.0 ? -1 : 0); }

double min_eigenvalue(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(eig.eigenvalues().size() - 1);
}

std::string describe(const ChartPoint& x) {
  std::ostringstream os;
  os << "chart " << x.chart << " (";
  for (Eigen::Index i = 0; i < x.coords.size(); ++i) os << (i ? ", " : "") << x.coords(i);
  os << ")";
  return os.str();
}

struct Tracker {
  Certificate cert;

  Tracker(Theorem theorem, double k, const SampleGrid& grid, const Manifold& model, const CertifyOptions& options) {
    if (grid.points.empty()) throw Error(ErrorKind::kInvalidArgument, "empty sample grid");
    if (!(options.delta >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "delta must be non-negative");
    cert.theorem = theorem;
    cert.k = k;
    cert.grid = grid.description;
    cert.delta = options.delta;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    cert.worst_point = grid.points.front();
    if (!model.compact()) cert.caveats.push_back("non-compact model: condition checked on a truncated disk only");
  }

  void record(const ChartPoint& x, double margin) {
    ++cert.points_checked;
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    if (margin < cert.worst_margin) {
      cert.worst_margin = margin;
      cert.worst_point = x;
    }
  }

  Certificate finish() {
    cert.pass = cert.points_checked == 0 || cert.worst_margin >= cert.delta;
    if (cert.points_checked == 0) cert.worst_margin = 0.0;
    return cert;
  }
};

// Margin of Hess f > -xi I in an arbitrary orthonormal frame.
Certificate certify_spectral(Theorem theorem, const MechanicalSystem& sys, const ScalarField& f,
                             const SampleGrid& grid, double k, const CertifyOptions& options) {
  Tracker track(theorem, k, grid, sys.model, options);
  double xi = 0.0;
  try {
    xi = threshold_xi(std::sqrt(std::abs(k)), sign_of(k));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDomain) throw;
    track.cert.caveats.push_back(std::string("threshold undefined: ") + e.what());
    for (const ChartPoint& x : grid.points) track.record(x, -std::numeric_limits<double>::infinity());
    return track.finish();
  }
  for (const ChartPoint& x : grid.points) {
    Matrix frame = orthonormal_frame(sys.model, x);
    track.record(x, min_eigenvalue(hessian_in_frame(sys, f, x, frame)) + xi);
  }
  return track.finish();
}

constexpr double kCriticalGradient = 1e-8;

}  // namespace

Certificate certify_natural(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                            const CertifyOptions& options) {
  if (sys.model.curvature_bound() > 0.0)
    throw Error(ErrorKind::kPrecondition,
                "natural-system condition needs non-positive sectional curvature; use the riemannian or 2d "
                "certifier on this model");
  Certificate cert = certify_spectral(Theorem::Natural, sys, f, grid, sys.hess_bound, options);
  if (!sys.hess_bound_declared && !sys.potential.identically_zero())
    cert.caveats.push_back("Hessian bound of the potential estimated on a grid");
  return cert;
}

Certificate certify_riemannian(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                               const CertifyOptions& options) {
  if (!sys.potential.identically_zero())
    throw Error(ErrorKind::kPrecondition, "riemannian condition applies to the free system (U = 0) only");
  const double k = options.k.value_or(sys.model.curvature_bound());
  if (k < sys.model.curvature_bound())
    throw Error(ErrorKind::kInvalidArgument, "k is below the sectional curvature of the model");
  const int n = sys.model.dim();
  Tracker track(Theorem::Riemannian, k, grid, sys.model, options);
  std::size_t critical = 0, outside = 0;
  for (const ChartPoint& x : grid.points) {
    Vector grad = f.gradient(sys.model, x);
    double norm = std::sqrt(f.differential(sys.model, x).dot(grad));
    Matrix bound = Matrix::Identity(n, n);
    Matrix frame;
    if (norm < kCriticalGradient) {
      ++critical;
      frame = orthonormal_frame(sys.model, x);
    } else {
      frame = orthonormal_frame(sys.model, x, &grad);
      double xi;
      try {
        xi = threshold_xi(std::sqrt(std::abs(k)) * norm, sign_of(k));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDomain) throw;
        ++outside;
        track.record(x, -std::numeric_limits<double>::infinity());
        continue;
      }
      for (int i = 1; i < n; ++i) bound(i, i) = xi;
    }
    track.record(x, min_eigenvalue(hessian_in_frame(sys, f, x, frame) + bound));
  }
  if (critical > 0)
    track.cert.caveats.push_back(std::to_string(critical) + " critical points checked against the -I limit");
  if (outside > 0)
    track.cert.caveats.push_back(std::to_string(outside) +
                                 " points with lambda >= pi where lambda cot(lambda) is undefined");
  return track.finish();
}

Certificate certify_2d(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                       const CertifyOptions& options) {
  if (sys.model.dim() != 2) throw Error(ErrorKind::kPrecondition, "2d condition needs a surface");
  if (!sys.potential.identically_zero())
    throw Error(ErrorKind::kPrecondition, "2d condition applies to the free system (U = 0) only");
  const double k = options.k.value_or(sys.model.curvature_bound());
  if (k < sys.model.curvature_bound())
    throw Error(ErrorKind::kInvalidArgument, "k is below the Gauss curvature of the model");
  Tracker track(Theorem::TwoDim, k, grid, sys.model, options);
  std::vector<std::string> critical;
  std::size_t critical_count = 0, outside = 0;
  for (const ChartPoint& x : grid.points) {
    Vector grad = f.gradient(sys.model, x);
    double norm = std::sqrt(f.differential(sys.model, x).dot(grad));
    if (norm <= kCriticalGradient) {
      if (++critical_count <= 5) critical.push_back(describe(x));
      continue;
    }
    double xi;
    try {
      xi = threshold_xi(std::sqrt(std::abs(k)) * norm, sign_of(k));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDomain) throw;
      ++outside;
      track.record(x, -std::numeric_limits<double>::infinity());
      continue;
    }
    // Conformal metrics: rotating coordinates by +90 degrees is the complex
    // structure J, so (v, Jv) is an oriented orthonormal frame.
    Matrix frame(2, 2);
    frame.col(0) = grad / norm;
    frame(0, 1) = -frame(1, 0);
    frame(1, 1) = frame(0, 0);
    Matrix s = hessian_in_frame(sys, f, x, frame);
    // With h1 = |grad f|^2 S11 and h2 = |grad f|^2 S22 the two conditions are
    // det(S + diag(1, xi)) > 0 and tr(S + diag(1, xi)) > 0.
    s(0, 0) += 1.0;
    s(1, 1) += xi;
    track.record(x, std::min(s.determinant(), s.trace()));
  }
  if (critical_count > 0) {
    std::string note = std::to_string(critical_count) + " critical points skipped:";
    for (const std::string& c : critical) note += " " + c;
    if (critical_count > critical.size()) note += " ...";
    track.cert.caveats.push_back(note);
  }
  if (outside > 0)
    track.cert.caveats.push_back(std::to_string(outside) +
                                 " points with lambda >= pi where lambda cot(lambda) is undefined");
  return track.finish();
}

Certificate certify_general(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid, double k,
                            const CertifyOptions& options) {
  if (!std::isfinite(k)) throw Error(ErrorKind::kInvalidArgument, "k must be finite");
  Certificate cert = certify_spectral(Theorem::General, sys, f, grid, k, options);
  double worst = -std::numeric_limits<double>::infinity();
  ChartPoint where = grid.points.front();
  for (const ChartPoint& x : grid.points) {
    CotangentState state{x, f.differential(sys.model, x)};
    Matrix frame = orthonormal_frame(sys.model, x);
    Matrix g = metric_at(sys.model, x).g;
    double top = max_eigenvalue(frame.transpose() * g * curvature_operator_matrix(sys, state) * frame);
    if (top > worst) {
      worst = top;
      where = x;
    }
  }
  if (worst > k + options.delta) {
    std::ostringstream os;
    os << "curvature bound violated: largest eigenvalue " << worst << " > k = " << k << " at " << describe(where);
    cert.caveats.push_back(os.str());
  }
  return cert;
}

}  // namespace ctcert
