#include "ctcert/curvature.hpp"

#include <Eigen/LU>

#include <cmath>

namespace ctcert {

SplittingData structure_constants(const MechanicalSystem& sys, const CotangentState& state) {
  const int n = sys.model.dim();
  Christoffel gamma = christoffel(sys.model, state.x);
  Matrix c = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) c += state.p(k) * gamma[k];
  return {state, c};
}

namespace {

// Fourth-order central difference of g along coordinate `i` of the stacked
// (x, p) argument.
template <typename Fn>
double d1(const Fn& g, const Vector& z, int i, double h) {
  auto at = [&](double s) {
    Vector w = z;
    w(i) += s;
    return g(w);
  };
  return (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
}

}  // namespace

Matrix structure_constants_general(const HamiltonianFn& H, const Vector& x, const Vector& p,
                                   const DifferenceSteps& steps) {
  const int n = static_cast<int>(x.size());
  Vector z(2 * n);
  z << x, p;
  auto h = [&](const Vector& w) { return H(w.head(n), w.tail(n)); };
  auto step = [&](int i) { return i < n ? steps.x : steps.p; };
  auto first = [&](int i, const Vector& w) { return d1(h, w, i, step(i)); };
  auto second = [&](int i, int j, const Vector& w) {
    return d1([&](const Vector& v) { return first(j, v); }, w, i, step(i));
  };
  auto third = [&](int i, int j, int k, const Vector& w) {
    return d1([&](const Vector& v) { return second(j, k, v); }, w, i, step(i));
  };
  const int P = n;  // offset of p-components

  Matrix hpp(n, n), rhs = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hpp(i, j) = second(P + i, P + j, z);
  Vector hp(n), hx(n);
  Matrix hpx(n, n);  // hpx(i, k) = H_{p_i x_k}
  for (int k = 0; k < n; ++k) {
    hp(k) = first(P + k, z);
    hx(k) = first(k, z);
    for (int i = 0; i < n; ++i) hpx(i, k) = second(k, P + i, z);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += hp(k) * third(k, P + i, P + j, z);
        acc -= hx(k) * third(P + k, P + i, P + j, z);
        acc -= hpx(i, k) * hpp(k, j);
        acc -= hpp(i, k) * hpx(j, k);
      }
      rhs(i, j) = acc;
    }
  Matrix inv = hpp.inverse();
  return 0.5 * inv * rhs * inv;
}

Matrix structure_constants_general(const MechanicalSystem& sys, const CotangentState& state,
                                   const DifferenceSteps& steps) {
  const int chart = state.x.chart;
  HamiltonianFn H = [&sys, chart](const Vector& x, const Vector& p) {
    return hamiltonian(sys, {ChartPoint{chart, x}, p});
  };
  return structure_constants_general(H, state.x.coords, state.p, steps);
}

Vector horizontal_lift(const MechanicalSystem& sys, const CotangentState& state, const Vector& v) {
  const int n = sys.model.dim();
  Matrix c = structure_constants(sys, state).c;
  Vector out(2 * n);
  out << v, c.transpose() * v;
  return out;
}

Vector vertical_lift(const MechanicalSystem& sys, const CotangentState& state, const Vector& v) {
  const int n = sys.model.dim();
  Vector out(2 * n);
  out << Vector::Zero(n), metric_at(sys.model, state.x).g * v;
  return out;
}

double symplectic_form(const Vector& a, const Vector& b) {
  const int n = static_cast<int>(a.size()) / 2;
  return a.tail(n).dot(b.head(n)) - a.head(n).dot(b.tail(n));
}

Matrix symplectic_matrix(int n) {
  Matrix omega = Matrix::Zero(2 * n, 2 * n);
  omega.topRightCorner(n, n) = -Matrix::Identity(n, n);
  omega.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return omega;
}

Vector curvature_operator(const MechanicalSystem& sys, const CotangentState& state, const Vector& v) {
  Vector u = metric_at(sys.model, state.x).g_inverse * state.p;
  Vector out = riemann_curvature(sys.model, state.x, u, v, u);
  if (!sys.potential.identically_zero()) out += sys.potential.hessian_operator(sys.model, state.x) * v;
  return out;
}

Matrix curvature_operator_matrix(const MechanicalSystem& sys, const CotangentState& state) {
  const int n = sys.model.dim();
  Matrix k(n, n);
  for (int i = 0; i < n; ++i) k.col(i) = curvature_operator(sys, state, Vector::Unit(n, i));
  return k;
}

Matrix adapted_frame(const MechanicalSystem& sys, const CotangentState& state) {
  Vector u = metric_at(sys.model, state.x).g_inverse * state.p;
  if (u.norm() == 0.0) return orthonormal_frame(sys.model, state.x);
  return orthonormal_frame(sys.model, state.x, &u);
}

FramePropagation propagate_canonical_frame(const MechanicalSystem& sys, const CotangentState& state0,
                                           const Matrix& frame0, double t_end, double step) {
  const int n = sys.model.dim();
  if (frame0.rows() != n || frame0.cols() != n)
    throw Error(ErrorKind::kInvalidArgument, "frame must be n x n");
  MetricPair m0 = metric_at(sys.model, state0.x);
  Matrix gram = frame0.transpose() * m0.g * frame0;
  if ((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorKind::kInvalidArgument, "initial frame is not orthonormal");

  // aux = [Phi | E^ | F^]
  WideMatrix aux0 = WideMatrix::Zero(2 * n, 4 * n);
  aux0.leftCols(2 * n) = Matrix::Identity(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    Vector v = frame0.col(i);
    aux0.col(2 * n + i) = vertical_lift(sys, state0, v);
    aux0.col(3 * n + i) = horizontal_lift(sys, state0, v);
  }

  AuxRhs rhs = [&sys, n](double, const CotangentState& s, const Matrix& dv, const WideMatrix& aux) {
    WideMatrix out(2 * n, 4 * n);
    out.leftCols(2 * n) = dv * aux.leftCols(2 * n);
    WideMatrix e = aux.middleCols(2 * n, n);
    WideMatrix f = aux.rightCols(n);
    MetricPair m = metric_at(sys.model, s.x);
    Matrix r = m.g * curvature_operator_matrix(sys, s) * m.g_inverse;
    WideMatrix re = WideMatrix::Zero(2 * n, n);
    re.bottomRows(n) = r * e.bottomRows(n);
    out.middleCols(2 * n, n) = dv * e - f;
    out.rightCols(n) = dv * f + re;
    return out;
  };

  AugmentedResult res = integrate_augmented(sys, state0, aux0, t_end, step, rhs, 1e12);
  FramePropagation out;
  out.blow_up = res.blow_up;
  for (const AugmentedSample& s : res.samples) {
    Matrix phi = s.aux.leftCols(2 * n);
    Eigen::FullPivLU<Matrix> lu(phi);
    WideMatrix eh = s.aux.middleCols(2 * n, n);
    WideMatrix fh = s.aux.rightCols(n);
    out.times.push_back(s.t);
    out.states.push_back(s.state);
    out.tangent_map.push_back(phi);
    out.E.push_back(lu.solve(eh));
    out.F.push_back(lu.solve(fh));
    Matrix ginv = metric_at(sys.model, s.state.x).g_inverse;
    out.transported.push_back(ginv * eh.bottomRows(n));
  }
  return out;
}

CurvatureMatrix curvature_matrix_at(const MechanicalSystem& sys, const FramePropagation& frames, std::size_t k) {
  const CotangentState& s = frames.states.at(k);
  const Matrix& v = frames.transported.at(k);
  Matrix g = metric_at(sys.model, s.x).g;
  Matrix op = curvature_operator_matrix(sys, s);
  return {frames.times[k], v.transpose() * g * op * v};
}

CurvatureMatrix curvature_matrix_along_extremal(const MechanicalSystem& sys, const CotangentState& state0,
                                                const Matrix& frame0, double t, double step) {
  FramePropagation frames = propagate_canonical_frame(sys, state0, frame0, t, step);
  if (frames.blow_up) throw Error(ErrorKind::kSingular, "canonical frame blew up", frames.blow_up);
  return curvature_matrix_at(sys, frames, frames.times.size() - 1);
}

std::optional<double> conjugate_time(const MechanicalSystem& sys, const CotangentState& state0,
                                     const Matrix& frame0, double t_max, double step) {
  const int n = sys.model.dim();
  WideMatrix tangent(2 * n, n);
  for (int i = 0; i < n; ++i) tangent.col(i) = vertical_lift(sys, state0, frame0.col(i));
  AugmentedResult res = flow_with_tangent(sys, state0, tangent, t_max, step);
  const double reference = frame0.determinant() >= 0.0 ? 1.0 : -1.0;
  double prev_t = 0.0, prev_d = 0.0;
  for (std::size_t k = 1; k < res.samples.size(); ++k) {
    const AugmentedSample& s = res.samples[k];
    Matrix jac = s.aux.topRows(n);
    double d = reference * s.orientation * jac.determinant();
    if (k > 1 && d <= 0.0 && prev_d > 0.0) return prev_t + (s.t - prev_t) * prev_d / (prev_d - d);
    prev_t = s.t;
    prev_d = d;
  }
  return std::nullopt;
}

}  // namespace ctcert
