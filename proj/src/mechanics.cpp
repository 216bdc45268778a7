#include "ctcert/mechanics.hpp"

#include "ctcert/grid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctcert {

double estimate_hessian_bound(const Manifold& model, const ScalarField& potential, int resolution) {
  if (potential.identically_zero()) return 0.0;
  SampleGrid grid = make_grid(model, resolution);
  double bound = -std::numeric_limits<double>::infinity();
  for (const ChartPoint& x : grid.points) {
    // Symmetric form of the operator in an orthonormal frame.
    Matrix frame = orthonormal_frame(model, x);
    Matrix s = frame.transpose() * potential.covariant_hessian(model, x) * frame;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
    bound = std::max(bound, eig.eigenvalues().maxCoeff());
  }
  return bound;
}

namespace {

double hessian_floor(const Manifold& model, const ScalarField& potential, const SampleGrid& grid) {
  double floor = 0.0;
  for (const ChartPoint& x : grid.points) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(potential.covariant_hessian(model, x),
                                                         metric_at(model, x).g, Eigen::EigenvaluesOnly);
    floor = std::min(floor, eig.eigenvalues().minCoeff());
  }
  return floor;
}

}  // namespace

MechanicalSystem make_system(Manifold model, ScalarField potential,
                             std::optional<double> declared_hess_bound, int estimate_resolution) {
  double estimate = estimate_hessian_bound(model, potential, estimate_resolution);
  double top = 0.0;
  if (!potential.identically_zero()) {
    SampleGrid grid = make_grid(model, estimate_resolution);
    top = -std::numeric_limits<double>::infinity();
    for (const ChartPoint& x : grid.points) top = std::max(top, potential.value(model, x));
    // Grid maximum plus the second-order interpolation error.
    top += 0.5 * std::max(0.0, -hessian_floor(model, potential, grid)) * grid.spacing * grid.spacing;
  }
  MechanicalSystem sys{std::move(model), std::move(potential), estimate, false};
  sys.potential_max = top;
  if (declared_hess_bound) {
    if (*declared_hess_bound < estimate - 1e-9) {
      std::ostringstream os;
      os << "declared Hessian bound " << *declared_hess_bound
         << " is below the sampled maximum eigenvalue " << estimate;
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
    sys.hess_bound = *declared_hess_bound;
    sys.hess_bound_declared = true;
  }
  return sys;
}

double hamiltonian(const MechanicalSystem& sys, const CotangentState& s) {
  MetricPair m = metric_at(sys.model, s.x);
  return 0.5 * s.p.dot(m.g_inverse * s.p) + sys.potential.value(sys.model, s.x);
}

Vector hamiltonian_vector_field(const MechanicalSystem& sys, const CotangentState& s) {
  const int n = sys.model.dim();
  MetricJet jet = metric_jet(sys.model, s.x);
  FieldJet u = sys.potential.jet(sys.model, s.x);
  Vector out(2 * n);
  Vector up = jet.g_inverse * s.p;  // velocity
  out.head(n) = up;
  for (int i = 0; i < n; ++i) {
    // -1/2 p^T d_i(g^{-1}) p = 1/2 v^T (d_i g) v
    out(n + i) = 0.5 * up.dot(jet.dg[i] * up) - u.differential(i);
  }
  return out;
}

Matrix hamiltonian_jacobian(const MechanicalSystem& sys, const CotangentState& s) {
  const int n = sys.model.dim();
  MetricJet jet = metric_jet(sys.model, s.x);
  FieldJet u = sys.potential.jet(sys.model, s.x);
  const Matrix& ginv = jet.g_inverse;
  std::vector<Matrix> dginv(n);
  for (int i = 0; i < n; ++i) dginv[i] = -ginv * jet.dg[i] * ginv;

  Matrix dv = Matrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) dv.block(0, k, n, 1) = dginv[k] * s.p;
  dv.block(0, n, n, n) = ginv;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Matrix ddginv = ginv * (jet.dg[i] * ginv * jet.dg[k] + jet.dg[k] * ginv * jet.dg[i] - jet.ddg[i][k]) * ginv;
      dv(n + i, k) = -0.5 * s.p.dot(ddginv * s.p) - u.coordinate_hessian(i, k);
    }
    Vector row = -(dginv[i] * s.p);
    for (int k = 0; k < n; ++k) dv(n + i, n + k) = row(k);
  }
  return dv;
}

namespace {

int step_count(double t_end, double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw Error(ErrorKind::kInvalidArgument, "integration step must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw Error(ErrorKind::kInvalidArgument, "integration horizon must be non-negative");
  if (t_end == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(t_end / step - 1e-9)));
}

CotangentState offset(const CotangentState& s, const Vector& dz, double h) {
  const int n = static_cast<int>(s.p.size());
  CotangentState out = s;
  out.x.coords += h * dz.head(n);
  out.p += h * dz.tail(n);
  return out;
}

}  // namespace

AugmentedResult integrate_augmented(const MechanicalSystem& sys, const CotangentState& state0,
                                    const WideMatrix& aux0, double t_end, double step,
                                    const AuxRhs& rhs, double blow_up_norm) {
  const Manifold& model = sys.model;
  const int n = model.dim();
  if (state0.p.size() != n) throw Error(ErrorKind::kInvalidArgument, "covector size does not match dimension");
  const int steps = step_count(t_end, step);
  const double h = steps > 0 ? t_end / steps : 0.0;
  const bool has_aux = aux0.cols() > 0;

  AugmentedResult result;
  AugmentedSample cur{0.0, {model.normalize(state0.x), state0.p}, aux0, 1};
  if (cur.state.x.chart != state0.x.chart) {
    auto tr = model.cotangent_to_chart(state0.x, state0.p, cur.state.x.chart);
    cur.state = {tr.point, tr.covector};
    if (has_aux) cur.aux = tr.jacobian * aux0;
    cur.orientation = -1;
  }
  if (!model.in_atlas(cur.state.x)) throw Error(ErrorKind::kEscape, "initial point outside the atlas", 0.0);
  result.samples.reserve(steps + 1);
  result.samples.push_back(cur);

  auto eval = [&](double t, const CotangentState& s, const WideMatrix& a, Vector& dz, WideMatrix& da) {
    dz = hamiltonian_vector_field(sys, s);
    if (has_aux) da = rhs(t, s, hamiltonian_jacobian(sys, s), a);
  };

  Vector k1, k2, k3, k4;
  WideMatrix a1, a2, a3, a4;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const CotangentState& s = cur.state;
    eval(t, s, cur.aux, k1, a1);
    eval(t + 0.5 * h, offset(s, k1, 0.5 * h), has_aux ? WideMatrix(cur.aux + 0.5 * h * a1) : cur.aux, k2, a2);
    eval(t + 0.5 * h, offset(s, k2, 0.5 * h), has_aux ? WideMatrix(cur.aux + 0.5 * h * a2) : cur.aux, k3, a3);
    eval(t + h, offset(s, k3, h), has_aux ? WideMatrix(cur.aux + h * a3) : cur.aux, k4, a4);
    Vector dz = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    CotangentState next = offset(s, dz, h);
    WideMatrix next_aux = cur.aux;
    if (has_aux) next_aux += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    const double t_next = (i + 1) * h;

    ChartPoint normalized = model.normalize(next.x);
    int orientation = cur.orientation;
    if (normalized.chart != next.x.chart) {
      auto tr = model.cotangent_to_chart(next.x, next.p, normalized.chart);
      next = {tr.point, tr.covector};
      if (has_aux) next_aux = tr.jacobian * next_aux;
      orientation = -orientation;
    } else {
      next.x = normalized;
    }
    if (!model.in_atlas(next.x)) {
      std::ostringstream os;
      os << "trajectory left the chart atlas at t=" << t_next;
      throw Error(ErrorKind::kEscape, os.str(), t_next);
    }
    cur = {t_next, next, next_aux, orientation};
    result.samples.push_back(cur);
    if (has_aux && std::isfinite(blow_up_norm)) {
      double worst = cur.aux.colwise().norm().maxCoeff();
      if (!(worst <= blow_up_norm)) {
        result.blow_up = t_next;
        break;
      }
    }
  }
  return result;
}

AugmentedResult flow_with_tangent(const MechanicalSystem& sys, const CotangentState& state0,
                                  const WideMatrix& tangent0, double t_end, double step) {
  return integrate_augmented(sys, state0, tangent0, t_end, step,
                             [](double, const CotangentState&, const Matrix& dv, const WideMatrix& aux) {
                               return WideMatrix(dv * aux);
                             });
}

FlowResult flow(const MechanicalSystem& sys, const CotangentState& state0, double t_end, double step) {
  if (t_end > 10.0) throw Error(ErrorKind::kInvalidArgument, "flow horizon must lie in [0, 10]");
  AugmentedResult aug = integrate_augmented(sys, state0, WideMatrix(2 * sys.model.dim(), 0), t_end, step,
                                            AuxRhs{});
  FlowResult out;
  out.step = aug.samples.size() > 1 ? aug.samples[1].t - aug.samples[0].t : 0.0;
  out.times.reserve(aug.samples.size());
  out.states.reserve(aug.samples.size());
  double h0 = hamiltonian(sys, aug.samples.front().state);
  for (const AugmentedSample& s : aug.samples) {
    out.times.push_back(s.t);
    out.states.push_back(s.state);
    out.energy_drift = std::max(out.energy_drift, std::abs(hamiltonian(sys, s.state) - h0));
  }
  return out;
}

namespace {

double lagrangian(const MechanicalSystem& sys, const CurveSample& s) {
  MetricPair m = metric_at(sys.model, s.x);
  return 0.5 * s.velocity.dot(m.g * s.velocity) - sys.potential.value(sys.model, s.x);
}

}  // namespace

double action(const MechanicalSystem& sys, const std::vector<CurveSample>& curve, double duration) {
  const int m = static_cast<int>(curve.size()) - 1;
  if (m < 1) throw Error(ErrorKind::kInvalidArgument, "curve needs at least two samples");
  std::vector<double> l(m + 1);
  for (int i = 0; i <= m; ++i) l[i] = lagrangian(sys, curve[i]);
  const double h = duration / m;
  if (m == 1) return 0.5 * h * (l[0] + l[1]);
  auto simpson = [&](int lo, int hi) {
    double acc = l[lo] + l[hi];
    for (int i = lo + 1; i < hi; ++i) acc += (i - lo) % 2 == 1 ? 4.0 * l[i] : 2.0 * l[i];
    return acc * h / 3.0;
  };
  if (m % 2 == 0) return simpson(0, m);
  double tail = 3.0 * h / 8.0 * (l[m - 3] + 3.0 * l[m - 2] + 3.0 * l[m - 1] + l[m]);
  return (m > 3 ? simpson(0, m - 3) : 0.0) + tail;
}

std::vector<CurveSample> curve_from_flow(const MechanicalSystem& sys, const FlowResult& result) {
  std::vector<CurveSample> curve;
  curve.reserve(result.states.size());
  for (const CotangentState& s : result.states)
    curve.push_back({s.x, metric_at(sys.model, s.x).g_inverse * s.p});
  return curve;
}

namespace {

struct Endpoint {
  Vector residual;
  Matrix jacobian;  // d residual / d p0
};

// On the torus the residual is measured against the lift x + displacement,
// so winding extremals are not mistaken for the requested one.
Endpoint shoot_once(const MechanicalSystem& sys, const ChartPoint& x, const Vector& p0, const ChartPoint& y,
                    const Vector& displacement, double step) {
  const Manifold& model = sys.model;
  const int n = model.dim();
  WideMatrix tangent = WideMatrix::Zero(2 * n, n);
  tangent.bottomRows(n) = Matrix::Identity(n, n);
  AugmentedResult r = flow_with_tangent(sys, {x, p0}, tangent, 1.0, step);
  const AugmentedSample& end = r.samples.back();
  Matrix dxdp = end.aux.topRows(n);
  Endpoint out;
  if (model.kind() == ManifoldKind::FlatTorus) {
    Vector travelled = Vector::Zero(n);
    for (std::size_t i = 1; i < r.samples.size(); ++i)
      travelled += chart_difference(model, r.samples[i - 1].state.x, r.samples[i].state.x);
    out.residual = travelled - displacement;
    out.jacobian = dxdp;
  } else if (end.state.x.chart != y.chart) {
    Manifold::Transition tr = model.to_chart(end.state.x, y.chart);
    out.residual = tr.point.coords - y.coords;
    out.jacobian = tr.jacobian * dxdp;
  } else {
    out.residual = end.state.x.coords - y.coords;
    out.jacobian = dxdp;
  }
  return out;
}

struct Newton {
  Vector p;
  double residual = 0.0;
  int iterations = 0;
};

Newton newton(const MechanicalSystem& sys, const ChartPoint& xs, const ChartPoint& ys, const Vector& displacement,
              Vector p, const CostOptions& options) {
  Endpoint e = shoot_once(sys, xs, p, ys, displacement, options.step);
  double res = e.residual.norm();
  int it = 0;
  for (; it < options.max_newton && res > options.tolerance; ++it) {
    Vector dp = e.jacobian.fullPivLu().solve(e.residual);
    if (!dp.allFinite()) break;
    // Backtrack when the full Newton step does not reduce the residual.
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 12; ++k, lambda *= 0.5) {
      Vector trial = p - lambda * dp;
      try {
        Endpoint et = shoot_once(sys, xs, trial, ys, displacement, options.step);
        double rt = et.residual.norm();
        if (rt < res) {
          p = trial;
          e = et;
          res = rt;
          improved = true;
          break;
        }
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::kEscape && err.kind() != ErrorKind::kDomain) throw;
      }
    }
    if (!improved) break;
  }
  return {p, res, it};
}

}  // namespace

ShootingResult shoot(const MechanicalSystem& sys, const ChartPoint& x, const ChartPoint& y,
                     const CostOptions& options) {
  const Manifold& model = sys.model;
  const int n = model.dim();
  ChartPoint xs = model.normalize(x);
  ChartPoint ys = model.normalize(y);
  Vector nearest = log_map(model, xs, ys);

  // Torus: extremals to the nearest lift of y and its neighbours, skipping
  // lifts whose action is bounded below by the best one found.
  std::vector<Vector> lifts{nearest};
  if (model.kind() == ManifoldKind::FlatTorus && !sys.potential.identically_zero()) {
    int count = 1;
    for (int i = 0; i < n; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      Vector d = nearest;
      bool shifted = false;
      for (int i = 0, c = code; i < n; ++i, c /= 3) {
        d(i) += (c % 3 - 1) * model.periods()[i];
        shifted = shifted || c % 3 != 1;
      }
      if (shifted) lifts.push_back(d);
    }
    std::stable_sort(lifts.begin(), lifts.end(),
                     [](const Vector& a, const Vector& b) { return a.squaredNorm() < b.squaredNorm(); });
  }

  ShootingResult result;
  bool found = false;
  double worst_residual = 0.0;
  int iterations = 0;
  for (const Vector& d : lifts) {
    if (found && 0.5 * d.squaredNorm() - sys.potential_max > result.cost) continue;
    Newton nt = newton(sys, xs, ys, d, metric_at(model, xs).g * d, options);
    iterations += nt.iterations;
    if (!(nt.residual <= options.accept_residual)) {
      worst_residual = std::max(worst_residual, nt.residual);
      continue;
    }
    FlowResult fr = flow(sys, {xs, nt.p}, 1.0, options.step);
    double c = action(sys, curve_from_flow(sys, fr));
    if (!found || c < result.cost) {
      result.cost = c;
      result.initial_covector = nt.p;
      result.residual = nt.residual;
      found = true;
    }
  }
  if (!found) {
    std::ostringstream os;
    os << "shooting did not converge (residual " << worst_residual << " after " << iterations << " Newton steps)";
    throw Error(ErrorKind::kNoConvergence, os.str());
  }
  result.iterations = iterations;
  return result;
}

double cost(const MechanicalSystem& sys, const ChartPoint& x, const ChartPoint& y, const CostOptions& options) {
  if (sys.potential.identically_zero()) {
    double d = distance(sys.model, x, y);
    return 0.5 * d * d;
  }
  return shoot(sys, x, y, options).cost;
}

}  // namespace ctcert
