#include "ctcert/field.hpp"

#include <cmath>
#include <numbers>

namespace ctcert {

ScalarField::ScalarField(std::string id, double amplitude, Evaluator evaluator, bool identically_zero)
    : id_(std::move(id)), amplitude_(amplitude), evaluator_(std::move(evaluator)), zero_(identically_zero) {}

ScalarField ScalarField::zero() {
  return ScalarField("zero", 0.0, [](const Manifold& m, const ChartPoint&) {
    const int n = m.dim();
    return FieldJet{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
  }, true);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pull back a function of the embedding point X (value, Euclidean gradient and
// Hessian in R^3) to sphere chart coordinates.
FieldJet pull_back_sphere(const Manifold& m, const ChartPoint& x,
                          const std::function<void(const Eigen::Vector3d&, double&, Eigen::Vector3d&,
                                                   Eigen::Matrix3d&)>& ambient) {
  Manifold::EmbeddingJet e = m.embedding_jet(x);
  double value;
  Eigen::Vector3d grad;
  Eigen::Matrix3d hess;
  ambient(e.value, value, grad, hess);
  FieldJet out{value, Vector(2), Matrix(2, 2)};
  for (int i = 0; i < 2; ++i) out.differential(i) = grad.dot(e.first.col(i));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.coordinate_hessian(i, j) =
          e.first.col(i).dot(hess * e.first.col(j)) + grad.dot(e.second[i][j]);
  return out;
}

std::vector<std::string> library(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::FlatTorus: return {"zero", "constant", "cos1", "cos_sum", "sin_product"};
    case ManifoldKind::Sphere2: return {"zero", "constant", "height", "tilted_height"};
    case ManifoldKind::Hyperbolic2: return {"zero", "constant", "radial", "linear_x"};
  }
  return {};
}

}  // namespace

std::vector<std::string> ScalarField::expressions_for(const Manifold& model) {
  return library(model.kind());
}

ScalarField ScalarField::from_expression(const Manifold& model, std::string_view id, double a) {
  const int n = model.dim();
  const std::string name(id);
  if (!std::isfinite(a)) throw Error(ErrorKind::kInvalidArgument, "field amplitude must be finite");
  if (name == "zero") return zero();
  if (name == "constant") {
    return ScalarField(name, a, [a](const Manifold& m, const ChartPoint&) {
      return FieldJet{a, Vector::Zero(m.dim()), Matrix::Zero(m.dim(), m.dim())};
    }, a == 0.0);
  }
  auto unknown = [&]() {
    return Error(ErrorKind::kInvalidArgument,
                 "expression '" + name + "' is not available on " + to_string(model.kind()));
  };

  switch (model.kind()) {
    case ManifoldKind::FlatTorus: {
      std::vector<double> omega;
      for (double p : model.periods()) omega.push_back(kTwoPi / p);
      if (name == "cos1") {
        return ScalarField(name, a, [a, omega, n](const Manifold&, const ChartPoint& x) {
          FieldJet j{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
          double w = omega[0], t = w * x.coords(0);
          j.value = a * std::cos(t);
          j.differential(0) = -a * w * std::sin(t);
          j.coordinate_hessian(0, 0) = -a * w * w * std::cos(t);
          return j;
        }, a == 0.0);
      }
      if (name == "cos_sum") {
        return ScalarField(name, a, [a, omega, n](const Manifold&, const ChartPoint& x) {
          FieldJet j{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
          for (int i = 0; i < n; ++i) {
            double w = omega[i], t = w * x.coords(i);
            j.value += a * std::cos(t);
            j.differential(i) = -a * w * std::sin(t);
            j.coordinate_hessian(i, i) = -a * w * w * std::cos(t);
          }
          return j;
        }, a == 0.0);
      }
      if (name == "sin_product" && n >= 2) {
        return ScalarField(name, a, [a, omega, n](const Manifold&, const ChartPoint& x) {
          FieldJet j{0.0, Vector::Zero(n), Matrix::Zero(n, n)};
          double w0 = omega[0], w1 = omega[1];
          double s0 = std::sin(w0 * x.coords(0)), c0 = std::cos(w0 * x.coords(0));
          double s1 = std::sin(w1 * x.coords(1)), c1 = std::cos(w1 * x.coords(1));
          j.value = a * s0 * s1;
          j.differential(0) = a * w0 * c0 * s1;
          j.differential(1) = a * w1 * s0 * c1;
          j.coordinate_hessian(0, 0) = -a * w0 * w0 * s0 * s1;
          j.coordinate_hessian(1, 1) = -a * w1 * w1 * s0 * s1;
          j.coordinate_hessian(0, 1) = j.coordinate_hessian(1, 0) = a * w0 * w1 * c0 * c1;
          return j;
        }, a == 0.0);
      }
      throw unknown();
    }
    case ManifoldKind::Sphere2: {
      Eigen::Vector3d axis;
      if (name == "height") {
        axis = Eigen::Vector3d::UnitZ();
      } else if (name == "tilted_height") {
        axis = Eigen::Vector3d(0.36, 0.48, 0.8);
      } else {
        throw unknown();
      }
      return ScalarField(name, a, [a, axis](const Manifold& m, const ChartPoint& x) {
        return pull_back_sphere(m, x, [&](const Eigen::Vector3d& X, double& v, Eigen::Vector3d& g,
                                          Eigen::Matrix3d& h) {
          v = a * axis.dot(X);
          g = a * axis;
          h.setZero();
        });
      }, a == 0.0);
    }
    case ManifoldKind::Hyperbolic2: {
      if (name == "radial") {
        return ScalarField(name, a, [a](const Manifold&, const ChartPoint& x) {
          return FieldJet{a * x.coords.squaredNorm(), 2.0 * a * x.coords,
                          2.0 * a * Matrix::Identity(2, 2)};
        }, a == 0.0);
      }
      if (name == "linear_x") {
        return ScalarField(name, a, [a](const Manifold&, const ChartPoint& x) {
          Vector d = Vector::Zero(2);
          d(0) = a;
          return FieldJet{a * x.coords(0), d, Matrix::Zero(2, 2)};
        }, a == 0.0);
      }
      throw unknown();
    }
  }
  throw unknown();
}

FieldJet ScalarField::jet(const Manifold& model, const ChartPoint& x) const {
  model.check_domain(x);
  return evaluator_(model, x);
}

double ScalarField::value(const Manifold& model, const ChartPoint& x) const {
  return jet(model, x).value;
}

Vector ScalarField::differential(const Manifold& model, const ChartPoint& x) const {
  return jet(model, x).differential;
}

Vector ScalarField::gradient(const Manifold& model, const ChartPoint& x) const {
  return metric_at(model, x).g_inverse * differential(model, x);
}

Matrix ScalarField::covariant_hessian(const Manifold& model, const ChartPoint& x) const {
  FieldJet j = jet(model, x);
  Christoffel gamma = christoffel(model, x);
  Matrix h = j.coordinate_hessian;
  for (int k = 0; k < model.dim(); ++k) h -= j.differential(k) * gamma[k];
  return h;
}

Matrix ScalarField::hessian_operator(const Manifold& model, const ChartPoint& x) const {
  return metric_at(model, x).g_inverse * covariant_hessian(model, x);
}

}  // namespace ctcert
