#pragma once

#include "ctcert/geometry.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ctcert {

// Value with first and second coordinate derivatives in the point's chart.
struct FieldJet {
  double value = 0.0;
  Vector differential;   // d f, covector components
  Matrix coordinate_hessian;
};

// A potential f (or U) on a model manifold.
//
// Fields come from a small expression library keyed by id, scaled by an
// amplitude, or from a user-supplied jet evaluator.
class ScalarField {
 public:
  using Evaluator = std::function<FieldJet(const Manifold&, const ChartPoint&)>;

  ScalarField(std::string id, double amplitude, Evaluator evaluator, bool identically_zero = false);

  // Expression ids:
  //   any model:   zero, constant
  //   flat torus:  cos1 (a cos(2 pi x1/P1)), cos_sum, sin_product (2d+)
  //   sphere:      height (a X3), tilted_height (a <n, X>)
  //   hyperbolic:  radial (a |u|^2), linear_x (a u1)
  static ScalarField from_expression(const Manifold& model, std::string_view id, double amplitude);
  static std::vector<std::string> expressions_for(const Manifold& model);
  static ScalarField zero();

  const std::string& id() const { return id_; }
  double amplitude() const { return amplitude_; }
  bool identically_zero() const { return zero_; }

  FieldJet jet(const Manifold& model, const ChartPoint& x) const;
  double value(const Manifold& model, const ChartPoint& x) const;
  Vector differential(const Manifold& model, const ChartPoint& x) const;
  // Metric gradient g^{-1} df.
  Vector gradient(const Manifold& model, const ChartPoint& x) const;
  // Covariant Hessian as a bilinear form: d_ij f - Gamma^k_ij d_k f.
  Matrix covariant_hessian(const Manifold& model, const ChartPoint& x) const;
  // Hessian as an endomorphism, g^{-1} (covariant Hessian).
  Matrix hessian_operator(const Manifold& model, const ChartPoint& x) const;

 private:
  std::string id_;
  double amplitude_;
  Evaluator evaluator_;
  bool zero_;
};

}  // namespace ctcert
