#include "ctcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace ctcert {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kEscape: return "escape";
    case ErrorKind::kNoConvergence: return "no_convergence";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kOracleUnreliable: return "oracle_unreliable";
    case ErrorKind::kNonDiffeomorphism: return "non_diffeomorphism";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::FlatTorus: return "flat_torus";
    case ManifoldKind::Sphere2: return "sphere2";
    case ManifoldKind::Hyperbolic2: return "hyperbolic2";
  }
  return "unknown";
}

Manifold Manifold::flat_torus(std::vector<double> periods) {
  if (periods.empty() || periods.size() > 3)
    throw Error(ErrorKind::kInvalidArgument, "flat torus dimension must be 1, 2 or 3");
  for (double p : periods)
    if (!(p > 0.0) || !std::isfinite(p))
      throw Error(ErrorKind::kInvalidArgument, "torus periods must be positive");
  Manifold m(ManifoldKind::FlatTorus, static_cast<int>(periods.size()));
  m.periods_ = std::move(periods);
  return m;
}

Manifold Manifold::sphere(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::kInvalidArgument, "sphere radius must be positive");
  Manifold m(ManifoldKind::Sphere2, 2);
  m.radius_ = radius;
  return m;
}

Manifold Manifold::hyperbolic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorKind::kInvalidArgument, "hyperbolic scale must be positive");
  Manifold m(ManifoldKind::Hyperbolic2, 2);
  m.scale_ = scale;
  return m;
}

double Manifold::curvature_bound() const {
  switch (kind_) {
    case ManifoldKind::FlatTorus: return 0.0;
    case ManifoldKind::Sphere2: return 1.0 / (radius_ * radius_);
    case ManifoldKind::Hyperbolic2: return -1.0 / (scale_ * scale_);
  }
  return 0.0;
}

ChartPoint Manifold::point(std::initializer_list<double> coords, int chart) const {
  if (static_cast<int>(coords.size()) != dim_)
    throw Error(ErrorKind::kInvalidArgument, "coordinate count does not match dimension");
  ChartPoint x;
  x.chart = chart;
  x.coords.resize(dim_);
  int i = 0;
  for (double c : coords) x.coords(i++) = c;
  return x;
}

void Manifold::check_domain(const ChartPoint& x) const {
  if (x.coords.size() != dim_)
    throw Error(ErrorKind::kDomain, "coordinate count does not match dimension");
  if (x.chart < 0 || x.chart >= chart_count())
    throw Error(ErrorKind::kDomain, "unknown chart id");
  if (!x.coords.allFinite())
    throw Error(ErrorKind::kDomain, "non-finite coordinates");
  if (kind_ == ManifoldKind::Hyperbolic2 && x.coords.squaredNorm() >= 1.0)
    throw Error(ErrorKind::kDomain, "point outside the Poincare disk");
}

bool Manifold::in_atlas(const ChartPoint& x) const {
  if (x.coords.size() != dim_ || !x.coords.allFinite()) return false;
  if (x.chart < 0 || x.chart >= chart_count()) return false;
  if (kind_ == ManifoldKind::Hyperbolic2)
    return x.coords.norm() < kDiskAtlasRadius;
  return true;
}

ChartPoint Manifold::normalize(const ChartPoint& x) const {
  check_domain(x);
  switch (kind_) {
    case ManifoldKind::FlatTorus: {
      ChartPoint y = x;
      for (int i = 0; i < dim_; ++i) {
        double p = periods_[i];
        double c = std::fmod(y.coords(i), p);
        if (c < 0.0) c += p;
        if (c >= p) c = 0.0;
        y.coords(i) = c;
      }
      return y;
    }
    case ManifoldKind::Sphere2:
      if (x.coords.norm() > kSphereSwitchRadius) return to_chart(x, 1 - x.chart).point;
      return x;
    case ManifoldKind::Hyperbolic2:
      return x;
  }
  return x;
}

Manifold::Transition Manifold::to_chart(const ChartPoint& x, int target) const {
  check_domain(x);
  if (target < 0 || target >= chart_count())
    throw Error(ErrorKind::kInvalidArgument, "unknown target chart");
  Transition t{x, Matrix::Identity(dim_, dim_)};
  if (target == x.chart) return t;
  // Sphere inversion u -> u / |u|^2.
  const Vector& u = x.coords;
  double s = u.squaredNorm();
  if (s < 1e-300) throw Error(ErrorKind::kDomain, "pole has no coordinates in the other chart");
  t.point.chart = target;
  t.point.coords = u / s;
  t.jacobian = (s * Matrix::Identity(2, 2) - 2.0 * u * u.transpose()) / (s * s);
  return t;
}

Manifold::PhaseTransition Manifold::cotangent_to_chart(const ChartPoint& x, const Vector& p,
                                                       int target) const {
  Transition t = to_chart(x, target);
  const int n = dim_;
  PhaseTransition out{t.point, p, Matrix::Identity(2 * n, 2 * n)};
  if (target == x.chart) return out;
  const Vector& u = x.coords;
  double s = u.squaredNorm();
  double up = u.dot(p);
  // q = J^{-T} p = (s I - 2 u u^T) p for the inversion.
  Matrix inv_t = s * Matrix::Identity(2, 2) - 2.0 * u * u.transpose();
  out.covector = inv_t * p;
  Matrix dq(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k)
      dq(i, k) = 2.0 * u(k) * p(i) - 2.0 * (i == k ? up : 0.0) - 2.0 * u(i) * p(k);
  out.jacobian.setZero();
  out.jacobian.topLeftCorner(2, 2) = t.jacobian;
  out.jacobian.bottomLeftCorner(2, 2) = dq;
  out.jacobian.bottomRightCorner(2, 2) = inv_t;
  return out;
}

Manifold::EmbeddingJet Manifold::embedding_jet(const ChartPoint& x) const {
  if (kind_ != ManifoldKind::Sphere2)
    throw Error(ErrorKind::kInvalidArgument, "embedding is only defined for the sphere");
  check_domain(x);
  const Vector& u = x.coords;
  double s = u.squaredNorm();
  double d = 1.0 + s;
  double sign = x.chart == 0 ? 1.0 : -1.0;
  // q = 1/(1+s) and its derivatives.
  double q = 1.0 / d;
  Eigen::Vector2d dq(-2.0 * u(0) / (d * d), -2.0 * u(1) / (d * d));
  Eigen::Matrix2d ddq;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      ddq(i, j) = (i == j ? -2.0 / (d * d) : 0.0) + 8.0 * u(i) * u(j) / (d * d * d);

  EmbeddingJet jet;
  jet.value = radius_ * Eigen::Vector3d(2.0 * u(0) * q, 2.0 * u(1) * q, sign * (1.0 - 2.0 * q));
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector3d col;
    for (int a = 0; a < 2; ++a) col(a) = 2.0 * (a == i ? q : 0.0) + 2.0 * u(a) * dq(i);
    col(2) = -2.0 * sign * dq(i);
    jet.first.col(i) = radius_ * col;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector3d h;
      for (int a = 0; a < 2; ++a)
        h(a) = 2.0 * (a == i ? dq(j) : 0.0) + 2.0 * (a == j ? dq(i) : 0.0) + 2.0 * u(a) * ddq(i, j);
      h(2) = -2.0 * sign * ddq(i, j);
      jet.second[i][j] = radius_ * h;
    }
  return jet;
}

Eigen::Vector3d Manifold::embed(const ChartPoint& x) const { return embedding_jet(x).value; }

ChartPoint Manifold::from_embedding(const Eigen::Vector3d& X) const {
  if (kind_ != ManifoldKind::Sphere2)
    throw Error(ErrorKind::kInvalidArgument, "embedding is only defined for the sphere");
  Eigen::Vector3d Y = X.normalized();
  ChartPoint p;
  p.coords.resize(2);
  if (Y(2) <= 0.0) {
    p.chart = 0;
    p.coords << Y(0) / (1.0 - Y(2)), Y(1) / (1.0 - Y(2));
  } else {
    p.chart = 1;
    p.coords << Y(0) / (1.0 + Y(2)), Y(1) / (1.0 + Y(2));
  }
  return p;
}

namespace {

// The supported models are all conformally flat: g = exp(2 phi) I.
struct ConformalJet {
  double phi = 0.0;
  Vector dphi;
  Matrix ddphi;
};

ConformalJet conformal_jet(const Manifold& m, const ChartPoint& x) {
  const int n = m.dim();
  ConformalJet c;
  c.dphi = Vector::Zero(n);
  c.ddphi = Matrix::Zero(n, n);
  if (m.kind() == ManifoldKind::FlatTorus) return c;
  const Vector& u = x.coords;
  double s = u.squaredNorm();
  if (m.kind() == ManifoldKind::Sphere2) {
    double d = 1.0 + s;
    c.phi = std::log(2.0 * m.radius()) - std::log(d);
    c.dphi = -2.0 * u / d;
    c.ddphi = -2.0 / d * Matrix::Identity(n, n) + 4.0 / (d * d) * u * u.transpose();
  } else {
    double d = 1.0 - s;
    c.phi = std::log(2.0 * m.scale()) - std::log(d);
    c.dphi = 2.0 * u / d;
    c.ddphi = 2.0 / d * Matrix::Identity(n, n) + 4.0 / (d * d) * u * u.transpose();
  }
  return c;
}

}  // namespace

MetricPair metric_at(const Manifold& model, const ChartPoint& x) {
  model.check_domain(x);
  const int n = model.dim();
  ConformalJet c = conformal_jet(model, x);
  double e = std::exp(2.0 * c.phi);
  return {e * Matrix::Identity(n, n), (1.0 / e) * Matrix::Identity(n, n)};
}

MetricJet metric_jet(const Manifold& model, const ChartPoint& x) {
  model.check_domain(x);
  const int n = model.dim();
  ConformalJet c = conformal_jet(model, x);
  double e = std::exp(2.0 * c.phi);
  Matrix id = Matrix::Identity(n, n);
  MetricJet jet;
  jet.g = e * id;
  jet.g_inverse = (1.0 / e) * id;
  jet.dg.resize(n);
  jet.ddg.assign(n, std::vector<Matrix>(n));
  for (int k = 0; k < n; ++k) {
    jet.dg[k] = 2.0 * c.dphi(k) * e * id;
    for (int l = 0; l < n; ++l)
      jet.ddg[k][l] = (4.0 * c.dphi(k) * c.dphi(l) + 2.0 * c.ddphi(k, l)) * e * id;
  }
  return jet;
}

namespace {

// A[l](i, j) = d_i g_lj + d_j g_li - d_l g_ij
std::vector<Matrix> lowered_combination(const std::vector<Matrix>& dg, int n) {
  std::vector<Matrix> a(n, Matrix::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[l](i, j) = dg[i](l, j) + dg[j](l, i) - dg[l](i, j);
  return a;
}

Christoffel christoffel_from_jet(const MetricJet& jet, int n) {
  std::vector<Matrix> a = lowered_combination(jet.dg, n);
  Christoffel gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) gamma[k] += 0.5 * jet.g_inverse(k, l) * a[l];
  return gamma;
}

// dGamma[m][k](i, j) = d_m Gamma^k_ij
std::vector<Christoffel> christoffel_derivative(const MetricJet& jet, int n) {
  std::vector<Matrix> a = lowered_combination(jet.dg, n);
  std::vector<Christoffel> out(n, Christoffel(n, Matrix::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    Matrix dginv = -jet.g_inverse * jet.dg[m] * jet.g_inverse;
    std::vector<Matrix> da(n, Matrix::Zero(n, n));
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          da[l](i, j) = jet.ddg[m][i](l, j) + jet.ddg[m][j](l, i) - jet.ddg[m][l](i, j);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        out[m][k] += 0.5 * dginv(k, l) * a[l] + 0.5 * jet.g_inverse(k, l) * da[l];
  }
  return out;
}

}  // namespace

Christoffel christoffel(const Manifold& model, const ChartPoint& x) {
  return christoffel_from_jet(metric_jet(model, x), model.dim());
}

Vector riemann_curvature(const Manifold& model, const ChartPoint& x, const Vector& u,
                         const Vector& v, const Vector& w) {
  const int n = model.dim();
  if (u.size() != n || v.size() != n || w.size() != n)
    throw Error(ErrorKind::kInvalidArgument, "tangent vector size does not match dimension");
  MetricJet jet = metric_jet(model, x);
  Christoffel gamma = christoffel_from_jet(jet, n);
  std::vector<Christoffel> dgamma = christoffel_derivative(jet, n);
  // Standard R^a_{ijk} = d_i G^a_jk - d_j G^a_ik + G^a_il G^l_jk - G^a_jl G^l_ik,
  // negated to get the convention <R(u,v)u, v> = K.
  Vector out = Vector::Zero(n);
  for (int a = 0; a < n; ++a) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double uv = u(i) * v(j);
        if (uv == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          double r = dgamma[i][a](j, k) - dgamma[j][a](i, k);
          for (int l = 0; l < n; ++l) r += gamma[a](i, l) * gamma[l](j, k) - gamma[a](j, l) * gamma[l](i, k);
          acc += uv * w(k) * r;
        }
      }
    out(a) = -acc;
  }
  return out;
}

namespace {
bool same_point(const ChartPoint& a, const ChartPoint& b) {
  return a.chart == b.chart && a.coords.size() == b.coords.size() && a.coords == b.coords;
}
}  // namespace

TangentVector riemann_curvature(const Manifold& model, const TangentVector& u,
                                const TangentVector& v, const TangentVector& w) {
  if (!same_point(u.base, v.base) || !same_point(u.base, w.base))
    throw Error(ErrorKind::kInvalidArgument, "contract violation: tangent vectors at different base points");
  return {u.base, riemann_curvature(model, u.base, u.components, v.components, w.components)};
}

double inner(const Matrix& g, const Vector& u, const Vector& v) { return u.dot(g * v); }

double sectional_curvature(const Manifold& model, const ChartPoint& x, const Vector& u,
                           const Vector& v) {
  Matrix g = metric_at(model, x).g;
  double area2 = inner(g, u, u) * inner(g, v, v) - std::pow(inner(g, u, v), 2);
  if (area2 <= 0.0) throw Error(ErrorKind::kInvalidArgument, "degenerate tangent plane");
  return inner(g, riemann_curvature(model, x, u, v, u), v) / area2;
}

Matrix orthonormal_frame(const Manifold& model, const ChartPoint& x, const Vector* first) {
  const int n = model.dim();
  Matrix g = metric_at(model, x).g;
  Matrix frame(n, n);
  int filled = 0;
  auto project_out = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < filled; ++j) v -= inner(g, frame.col(j), v) * Vector(frame.col(j));
    return v;
  };
  if (first) {
    if (first->size() != n) throw Error(ErrorKind::kInvalidArgument, "first vector has wrong size");
    double norm = std::sqrt(inner(g, *first, *first));
    if (!(norm > 0.0)) throw Error(ErrorKind::kInvalidArgument, "first frame vector is zero");
    frame.col(0) = *first / norm;
    filled = 1;
  }
  std::vector<bool> used(n, false);
  while (filled < n) {
    int best = -1;
    double best_norm = -1.0;
    Vector best_vec;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      Vector r = project_out(Vector::Unit(n, i));
      double norm = std::sqrt(inner(g, r, r));
      if (norm > best_norm * (1.0 + 1e-12)) {
        best = i;
        best_norm = norm;
        best_vec = r;
      }
    }
    used[best] = true;
    frame.col(filled++) = best_vec / best_norm;
  }
  return frame;
}

double distance(const Manifold& model, const ChartPoint& x, const ChartPoint& y) {
  model.check_domain(x);
  model.check_domain(y);
  switch (model.kind()) {
    case ManifoldKind::FlatTorus:
      return chart_difference(model, x, y).norm();
    case ManifoldKind::Sphere2: {
      Eigen::Vector3d a = model.embed(x).normalized();
      Eigen::Vector3d b = model.embed(y).normalized();
      return model.radius() * std::atan2(a.cross(b).norm(), a.dot(b));
    }
    case ManifoldKind::Hyperbolic2: {
      double du = (x.coords - y.coords).norm();
      double denom = std::sqrt((1.0 - x.coords.squaredNorm()) * (1.0 - y.coords.squaredNorm()));
      return 2.0 * model.scale() * std::asinh(du / denom);
    }
  }
  return 0.0;
}

Vector chart_difference(const Manifold& model, const ChartPoint& x, const ChartPoint& y) {
  if (model.kind() == ManifoldKind::FlatTorus) {
    Vector d = y.coords - x.coords;
    for (int i = 0; i < model.dim(); ++i) {
      double p = model.periods()[i];
      d(i) -= p * std::round(d(i) / p);
    }
    return d;
  }
  if (y.chart != x.chart) return model.to_chart(y, x.chart).point.coords - x.coords;
  return y.coords - x.coords;
}

Vector log_map(const Manifold& model, const ChartPoint& x, const ChartPoint& y) {
  model.check_domain(x);
  model.check_domain(y);
  switch (model.kind()) {
    case ManifoldKind::FlatTorus:
      return chart_difference(model, x, y);
    case ManifoldKind::Sphere2: {
      Manifold::EmbeddingJet jet = model.embedding_jet(x);
      Eigen::Vector3d a = jet.value.normalized();
      Eigen::Vector3d b = model.embed(y).normalized();
      Eigen::Vector3d w = b - a.dot(b) * a;
      double wn = w.norm();
      double theta = std::atan2(wn, a.dot(b));
      if (wn < 1e-15) {
        if (theta < 1.0) return Vector::Zero(2);
        // Antipodal: every direction is minimizing; take the first chart axis.
        w = jet.first.col(0) - jet.first.col(0).dot(a) * a;
        wn = w.norm();
      }
      Eigen::Vector3d v_emb = model.radius() * theta * w / wn;
      Eigen::Matrix<double, 3, 2> J = jet.first;
      Eigen::Vector2d v = (J.transpose() * J).ldlt().solve(J.transpose() * v_emb);
      return Vector(v);
    }
    case ManifoldKind::Hyperbolic2: {
      using C = std::complex<double>;
      C zx(x.coords(0), x.coords(1));
      C zy(y.coords(0), y.coords(1));
      C w = (zy - zx) / (1.0 - std::conj(zx) * zy);
      double r = std::abs(w);
      if (r < 1e-300) return Vector::Zero(2);
      C v0 = w / r * std::atanh(r);
      C v = (1.0 - std::norm(zx)) * v0;
      Vector out(2);
      out << v.real(), v.imag();
      return out;
    }
  }
  return Vector::Zero(model.dim());
}

}  // namespace ctcert
