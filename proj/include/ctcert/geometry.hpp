#pragma once

#include "ctcert/types.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace ctcert {

enum class ManifoldKind { FlatTorus, Sphere2, Hyperbolic2 };

const char* to_string(ManifoldKind kind);

struct ChartPoint {
  int chart = 0;
  Vector coords;
};

struct TangentVector {
  ChartPoint base;
  Vector components;
};

// Model geometry with an explicit atlas.
//
// FlatTorus: one chart, coordinates wrapped to [0, period).
// Sphere2: stereographic charts from the north pole (chart 0, origin at the
// south pole) and from the south pole (chart 1). The transition is the
// inversion u -> u/|u|^2; points are moved to the other chart once
// |u| > kSphereSwitchRadius.
// Hyperbolic2: Poincare disk of curvature -1/scale^2. The metric is defined
// for |u| < 1 but the atlas is truncated at kDiskAtlasRadius, and leaving it
// counts as escaping the model.
class Manifold {
 public:
  static constexpr double kSphereSwitchRadius = 1.5;
  static constexpr double kDiskAtlasRadius = 0.9;

  static Manifold flat_torus(std::vector<double> periods);
  static Manifold sphere(double radius = 1.0);
  static Manifold hyperbolic(double scale = 1.0);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool compact() const { return kind_ != ManifoldKind::Hyperbolic2; }
  // Constant sectional curvature of the model; also the tightest upper bound.
  double curvature_bound() const;
  const std::vector<double>& periods() const { return periods_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }
  int chart_count() const { return kind_ == ManifoldKind::Sphere2 ? 2 : 1; }

  ChartPoint point(std::initializer_list<double> coords, int chart = 0) const;

  // Throws a domain error when the metric is undefined at x.
  void check_domain(const ChartPoint& x) const;
  bool in_atlas(const ChartPoint& x) const;

  // Wraps torus coordinates and switches sphere charts past the switch radius.
  ChartPoint normalize(const ChartPoint& x) const;

  // Coordinates of x in `target` chart together with the Jacobian
  // d(target coords)/d(source coords).
  struct Transition {
    ChartPoint point;
    Matrix jacobian;
  };
  Transition to_chart(const ChartPoint& x, int target) const;

  // Phase-space chart change for (x, p): returns the new state components and
  // the 2n x 2n Jacobian acting on [dx; dp].
  struct PhaseTransition {
    ChartPoint point;
    Vector covector;
    Matrix jacobian;
  };
  PhaseTransition cotangent_to_chart(const ChartPoint& x, const Vector& p,
                                     int target) const;

  // Sphere only: chart point <-> point of the embedded sphere of radius r.
  Eigen::Vector3d embed(const ChartPoint& x) const;
  ChartPoint from_embedding(const Eigen::Vector3d& X) const;
  // d X / d u_i (columns) and d^2 X / d u_i d u_j.
  struct EmbeddingJet {
    Eigen::Vector3d value;
    Eigen::Matrix<double, 3, 2> first;
    Eigen::Vector3d second[2][2];
  };
  EmbeddingJet embedding_jet(const ChartPoint& x) const;

 private:
  Manifold(ManifoldKind kind, int dim) : kind_(kind), dim_(dim) {}

  ManifoldKind kind_;
  int dim_;
  std::vector<double> periods_;
  double radius_ = 1.0;
  double scale_ = 1.0;
};

struct MetricPair {
  Matrix g;
  Matrix g_inverse;
};

// Metric together with its first and second coordinate derivatives.
struct MetricJet {
  Matrix g;
  Matrix g_inverse;
  std::vector<Matrix> dg;                 // dg[k] = d g / d x_k
  std::vector<std::vector<Matrix>> ddg;   // ddg[k][l] = d^2 g / d x_k d x_l
};

// Gamma[k](i, j) = Gamma^k_{ij}.
using Christoffel = std::vector<Matrix>;

MetricPair metric_at(const Manifold& model, const ChartPoint& x);
MetricJet metric_jet(const Manifold& model, const ChartPoint& x);
Christoffel christoffel(const Manifold& model, const ChartPoint& x);

// Curvature with the sign convention in which <R(u,v)u, v> is the sectional
// curvature of the plane spanned by orthonormal u, v.
Vector riemann_curvature(const Manifold& model, const ChartPoint& x,
                         const Vector& u, const Vector& v, const Vector& w);
TangentVector riemann_curvature(const Manifold& model, const TangentVector& u,
                                const TangentVector& v, const TangentVector& w);
double sectional_curvature(const Manifold& model, const ChartPoint& x,
                           const Vector& u, const Vector& v);

double inner(const Matrix& g, const Vector& u, const Vector& v);

// Gram-Schmidt against the metric. Columns of the result are the frame.
// With `first`, column 0 is first/|first|; remaining seeds are coordinate
// vectors taken in order of decreasing residual norm.
Matrix orthonormal_frame(const Manifold& model, const ChartPoint& x,
                         const Vector* first = nullptr);

double distance(const Manifold& model, const ChartPoint& x,
                const ChartPoint& y);

// Initial velocity (in the chart of x) of the minimizing geodesic reaching y
// at time 1.
Vector log_map(const Manifold& model, const ChartPoint& x, const ChartPoint& y);

// Difference y - x expressed in the chart of x, using the nearest lattice
// translate on the torus.
Vector chart_difference(const Manifold& model, const ChartPoint& x,
                        const ChartPoint& y);

}  // namespace ctcert
