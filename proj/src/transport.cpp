#include "ctcert/transport.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

namespace ctcert {

std::vector<MapImage> build_map(const MechanicalSystem& sys, const ScalarField& f,
                                const std::vector<ChartPoint>& points, double step) {
  std::vector<MapImage> out;
  out.reserve(points.size());
  for (const ChartPoint& x : points) {
    MapImage m;
    try {
      FlowResult r = flow(sys, {x, f.differential(sys.model, x)}, 1.0, step);
      m.image = r.states.back().x;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEscape && e.kind() != ErrorKind::kDomain) throw;
      m.error = e.what();
    }
    out.push_back(std::move(m));
  }
  return out;
}

CTransformResult c_transform(const MechanicalSystem& sys, const ScalarField& f, const SampleGrid& grid,
                             const CostOptions& options) {
  if (grid.resolution < 16) throw Error(ErrorKind::kInvalidArgument, "c-transform grid needs resolution >= 16");
  const std::size_t n = grid.points.size();
  CTransformResult out;
  out.grid = grid.description;
  out.points = grid.points;
  out.spacing = grid.spacing;
  out.f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ChartPoint& x = grid.points[i];
    out.f[i] = f.value(sys.model, x);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(f.covariant_hessian(sys.model, x),
                                                         metric_at(sys.model, x).g, Eigen::EigenvaluesOnly);
    out.hessian_bound = std::max(out.hessian_bound, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  out.tol_grid = 10.0 * (out.hessian_bound + 1.0) * out.spacing * out.spacing;

  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      try {
        c(i, j) = cost(sys, grid.points[i], grid.points[j], options);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoConvergence && e.kind() != ErrorKind::kEscape &&
            e.kind() != ErrorKind::kDomain)
          throw;
        c(i, j) = std::numeric_limits<double>::quiet_NaN();
        ++out.failed_pairs;
      }
    }
  if (out.failed_pairs * 100 > n * n) {
    std::ostringstream os;
    os << "cost evaluation failed on " << out.failed_pairs << " of " << n * n << " pairs";
    throw Error(ErrorKind::kOracleUnreliable, os.str());
  }

  out.f_c.assign(n, inf);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isnan(c(i, j))) out.f_c[j] = std::min(out.f_c[j], c(i, j) + out.f[i]);
  out.f_cc.assign(n, -inf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isnan(c(i, j))) out.f_cc[i] = std::max(out.f_cc[i], out.f_c[j] - c(i, j));
  for (std::size_t i = 0; i < n; ++i) {
    double d = std::abs(out.f[i] - out.f_cc[i]);
    if (d > out.max_defect) {
      out.max_defect = d;
      out.worst_index = i;
    }
  }
  out.c_convex = out.max_defect <= out.tol_grid;
  return out;
}

namespace {

struct Arc {
  CotangentState end;
  double value = 0.0;
  Matrix jacobian;
  double min_det = 1.0;
};

Arc follow(const MechanicalSystem& sys, const ScalarField& f, const ChartPoint& x0, double t, double step) {
  const int n = sys.model.dim();
  FieldJet jet = f.jet(sys.model, x0);
  WideMatrix tangent(2 * n, n);
  tangent.topRows(n) = Matrix::Identity(n, n);
  tangent.bottomRows(n) = jet.coordinate_hessian;
  Arc arc;
  if (t == 0.0) {
    arc.end = {x0, jet.differential};
    arc.value = jet.value;
    arc.jacobian = Matrix::Identity(n, n);
    return arc;
  }
  AugmentedResult r = flow_with_tangent(sys, {x0, jet.differential}, tangent, t, step);
  std::vector<CurveSample> curve;
  curve.reserve(r.samples.size());
  for (const AugmentedSample& s : r.samples) {
    curve.push_back({s.state.x, metric_at(sys.model, s.state.x).g_inverse * s.state.p});
    double det = s.orientation * Matrix(s.aux.topRows(n)).determinant();
    arc.min_det = std::min(arc.min_det, det);
  }
  const AugmentedSample& last = r.samples.back();
  arc.end = last.state;
  arc.value = jet.value + action(sys, curve, t);
  arc.jacobian = last.aux.topRows(n);
  return arc;
}

}  // namespace

std::vector<Characteristic> characteristics(const MechanicalSystem& sys, const ScalarField& f, double t,
                                            const std::vector<ChartPoint>& points, double step) {
  if (!(t >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "time must be non-negative");
  std::vector<Characteristic> out;
  out.reserve(points.size());
  for (const ChartPoint& x : points) {
    Arc a = follow(sys, f, x, t, step);
    out.push_back({x, a.end, a.value, a.jacobian, a.min_det});
  }
  return out;
}

PotentialSamples evolve_potential(const MechanicalSystem& sys, const ScalarField& f, double t,
                                  const std::vector<ChartPoint>& base_points, double step) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "time must lie in [0, 1]");
  std::vector<Characteristic> chars = characteristics(sys, f, t, base_points, step);
  PotentialSamples out;
  out.t = t;
  for (const Characteristic& c : chars) {
    if (c.min_jacobian_det <= 0.0) {
      std::ostringstream os;
      os << "characteristics fold: Jacobian determinant " << c.min_jacobian_det << " from base point (";
      for (Eigen::Index i = 0; i < c.base.coords.size(); ++i) os << (i ? ", " : "") << c.base.coords(i);
      os << ")";
      throw Error(ErrorKind::kNonDiffeomorphism, os.str(), t);
    }
    out.points.push_back(c.end.x);
    out.values.push_back(c.value);
    out.covectors.push_back(c.end.p);
  }
  for (std::size_t i = 0; i < chars.size(); ++i)
    for (std::size_t j = i + 1; j < chars.size(); ++j) {
      if (chart_difference(sys.model, out.points[i], out.points[j]).norm() > 1e-9) continue;
      if (std::abs(out.values[i] - out.values[j]) > 1e-9)
        throw Error(ErrorKind::kNonDiffeomorphism, "two characteristics meet with different values", t);
    }
  return out;
}

namespace {

// y' - y in the chart of y, with its Jacobian d(y')/d(x') given
// d(y')/d(x') in the chart of y'.
struct Offset {
  Vector delta;
  Matrix jacobian;
};

Offset offset(const Manifold& model, const ChartPoint& y, const ChartPoint& yp, const Matrix& jac) {
  if (model.kind() != ManifoldKind::FlatTorus && yp.chart != y.chart) {
    Manifold::Transition tr = model.to_chart(yp, y.chart);
    return {tr.point.coords - y.coords, tr.jacobian * jac};
  }
  return {chart_difference(model, y, yp), jac};
}

// f_s(y) through the characteristic ending at y, started from x.
double value_at(const MechanicalSystem& sys, const ScalarField& f, const ChartPoint& y, ChartPoint x, double s,
                double step) {
  for (int it = 0; it < 30; ++it) {
    Arc a = follow(sys, f, x, s, step);
    Offset o = offset(sys.model, y, a.end.x, a.jacobian);
    if (o.delta.norm() < 1e-12) return a.value;
    Vector dx = o.jacobian.fullPivLu().solve(o.delta);
    x.coords -= dx;
    x = sys.model.normalize(x);
  }
  throw Error(ErrorKind::kNoConvergence, "could not invert the characteristic map", s);
}

}  // namespace

HJValidation validate_hamilton_jacobi(const MechanicalSystem& sys, const ScalarField& f, double t,
                                      const std::vector<ChartPoint>& base_points, const HJOptions& options) {
  if (!(t > 0.0 && t <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "time must lie in (0, 1]");
  const int n = sys.model.dim();
  const double d = options.spatial_step, tau = options.time_step;
  HJValidation out;
  for (const ChartPoint& x : base_points) {
    Arc centre = follow(sys, f, x, t, options.flow_step);
    const ChartPoint& y = centre.end.x;

    Matrix dy(n, n);
    Vector dv(n);
    for (int k = 0; k < n; ++k) {
      ChartPoint xp = x, xm = x;
      xp.coords(k) += d;
      xm.coords(k) -= d;
      Arc ap = follow(sys, f, sys.model.normalize(xp), t, options.flow_step);
      Arc am = follow(sys, f, sys.model.normalize(xm), t, options.flow_step);
      dy.col(k) = offset(sys.model, y, ap.end.x, Matrix::Identity(n, n)).delta -
                  offset(sys.model, y, am.end.x, Matrix::Identity(n, n)).delta;
      dv(k) = ap.value - am.value;
    }
    // df_t(y) dy_k = dv_k for every k
    Vector p_rec = dy.transpose().fullPivLu().solve(dv);
    double cov_err = (p_rec - centre.end.p).norm();
    if (out.samples == 0 || cov_err > out.covector_error) {
      out.covector_error = cov_err;
      out.worst_covector_point = x;
    }

    double fp = value_at(sys, f, y, x, t + tau, options.flow_step);
    double fm = value_at(sys, f, y, x, t - tau, options.flow_step);
    double residual = std::abs((fp - fm) / (2.0 * tau) + hamiltonian(sys, centre.end));
    if (out.samples == 0 || residual > out.hj_residual) {
      out.hj_residual = residual;
      out.worst_residual_point = x;
    }
    ++out.samples;
  }
  return out;
}

TransportReport verify_optimality(const MechanicalSystem& sys, const ScalarField& f, int samples,
                                  std::uint64_t seed, const VerifyOptions& options) {
  if (samples < 1 || samples > kMaxAssignmentSize)
    throw Error(ErrorKind::kInvalidArgument, "sample count must lie in [1, 512]");
  TransportReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.sample_points = sample_uniform(sys.model, samples, seed);
  std::vector<Characteristic> chars = characteristics(sys, f, 1.0, rep.sample_points, options.step);

  const int n = samples;
  Eigen::MatrixXd c(n, n);
  for (const Characteristic& ch : chars) rep.images.push_back(ch.end.x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = cost(sys, rep.sample_points[i], rep.images[j], options.cost);

  Assignment a = assignment_oracle(c);
  rep.permutation = a.permutation;
  rep.monge_cost = c.trace() / n;
  rep.assignment_cost = a.value / n;
  rep.optimality_gap = rep.monge_cost - rep.assignment_cost;
  bool identity = true;
  for (int i = 0; i < n; ++i) identity = identity && a.permutation[i] == i;
  rep.assignment_is_identity = identity || rep.optimality_gap <= 1e-12;

  double mean_f0 = 0.0, mean_f1 = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_f0 += f.value(sys.model, rep.sample_points[i]);
    mean_f1 += chars[i].value;
  }
  rep.duality_gap = std::abs(rep.monge_cost - (mean_f1 - mean_f0) / n);
  return rep;
}

}  // namespace ctcert
