#include "ctcert/assignment.hpp"
#include "ctcert/transport.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace ctcert;

namespace {

const double pi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double brute_force_min(const Eigen::MatrixXd& c) {
  std::vector<int> perm(c.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double v = 0.0;
    for (int i = 0; i < c.rows(); ++i) v += c(i, perm[i]);
    best = std::min(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// f(x) = a x on a long circle, used away from the seam as a function on a line.
ScalarField plane_wave(double a) {
  return ScalarField("plane_wave", a, [a](const Manifold&, const ChartPoint& x) {
    FieldJet j;
    j.value = a * x.coords(0);
    j.differential = vec({a});
    j.coordinate_hessian = Matrix::Zero(1, 1);
    return j;
  });
}

}  // namespace

TEST_SUITE("transport") {
  TEST_CASE("assignment examples") {
    Eigen::MatrixXd d(4, 4);
    d << 0, 5, 5, 5, 5, 0, 5, 5, 5, 5, 0, 5, 5, 5, 5, 0;
    Assignment id = assignment_oracle(d);
    CHECK(id.permutation == std::vector<int>{0, 1, 2, 3});
    CHECK(id.value == 0.0);

    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 3, 2, 4, 6, 3, 6, 9;
    Assignment a = assignment_oracle(m);
    CHECK(a.value == brute_force_min(m));
    CHECK(a.value == 10.0);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += m(i, a.permutation[i]);
    CHECK(sum == a.value);

    testing_support::Rng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXd c(8, 8);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) c(i, j) = rng.uniform(-1, 3);
      CHECK(assignment_oracle(c).value == doctest::Approx(brute_force_min(c)).epsilon(1e-13));
    }
  }

  TEST_CASE("assignment errors") {
    Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
    nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(assignment_oracle(nan), Error);
    CHECK_THROWS_AS(assignment_oracle(Eigen::MatrixXd::Zero(2, 3)), Error);
    CHECK_THROWS_AS(assignment_oracle(Eigen::MatrixXd::Zero(513, 513)), Error);
    CHECK(assignment_oracle(Eigen::MatrixXd::Zero(0, 0)).permutation.empty());
  }

  TEST_CASE("map examples") {
    Manifold circle = Manifold::flat_torus({1.0});
    MechanicalSystem free = make_system(circle, ScalarField::zero());
    std::vector<ChartPoint> pts{circle.point({0.1}), circle.point({0.25}), circle.point({0.8})};
    std::vector<MapImage> id = build_map(free, ScalarField::zero(), pts);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(id[i].image->coords(0) == pts[i].coords(0));

    const double eps = 0.01;
    ScalarField f = ScalarField::from_expression(circle, "cos1", eps);
    std::vector<MapImage> m = build_map(free, f, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double x = pts[i].coords(0);
      double expect = x - 2 * pi * eps * std::sin(2 * pi * x);
      expect -= std::floor(expect);
      CHECK(std::abs(m[i].image->coords(0) - expect) < 1e-9);
    }
    CHECK(m[1].image->coords(0) == doctest::Approx(0.25 - 2 * pi * eps).epsilon(1e-12));

    // On the sphere the image is the exponential of the gradient.
    Manifold sphere = Manifold::sphere();
    MechanicalSystem round = make_system(sphere, ScalarField::zero());
    ScalarField h = ScalarField::from_expression(sphere, "tilted_height", 0.3);
    testing_support::Rng rng(52);
    for (int trial = 0; trial < 5; ++trial) {
      ChartPoint x = sphere.point({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      ChartPoint y = *build_map(round, h, {x})[0].image;
      Manifold::EmbeddingJet jet = sphere.embedding_jet(x);
      Eigen::Vector3d p = jet.value, v = jet.first * Eigen::Vector2d(h.gradient(sphere, x));
      double s = v.norm();
      Eigen::Vector3d expect = s > 0 ? Eigen::Vector3d(std::cos(s) * p + std::sin(s) * v / s) : p;
      CHECK((sphere.embed(y) - expect).norm() < 1e-6);
    }
  }

  TEST_CASE("escaping characteristics are reported per point") {
    Manifold disk = Manifold::hyperbolic();
    MechanicalSystem sys = make_system(disk, ScalarField::zero());
    ScalarField f = ScalarField::from_expression(disk, "linear_x", 5.0);
    std::vector<MapImage> m = build_map(sys, f, {disk.point({0.7, 0.0}), disk.point({0.0, 0.0})});
    CHECK_FALSE(m[0].image);
    CHECK_FALSE(m[0].error.empty());
  }

  TEST_CASE("c-transform examples") {
    Manifold circle = Manifold::flat_torus({1.0});
    MechanicalSystem free = make_system(circle, ScalarField::zero());
    SampleGrid grid = make_grid(circle, 64);
    CTransformResult zero = c_transform(free, ScalarField::zero(), grid);
    CHECK(zero.max_defect == 0.0);
    CHECK(zero.c_convex);
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      CHECK(zero.f_c[i] == 0.0);
      CHECK(zero.f_cc[i] == 0.0);
    }

    CTransformResult good = c_transform(free, ScalarField::from_expression(circle, "cos1", 0.01), grid);
    CHECK(good.c_convex);
    CHECK(good.max_defect <= good.tol_grid);
    CHECK(good.hessian_bound == doctest::Approx(4 * pi * pi * 0.01).epsilon(1e-12));

    CTransformResult bad = c_transform(free, ScalarField::from_expression(circle, "cos1", 0.2), grid);
    CHECK_FALSE(bad.c_convex);
    CHECK(bad.max_defect > 1e-3);

    for (const CTransformResult* r : {&zero, &good, &bad})
      for (std::size_t i = 0; i < r->f.size(); ++i) CHECK(r->f_cc[i] <= r->f[i] + 1e-12);

    CHECK_THROWS_AS(c_transform(free, ScalarField::zero(), make_grid(circle, 8)), Error);
  }

  TEST_CASE("potential evolution") {
    Manifold circle = Manifold::flat_torus({1.0});
    MechanicalSystem free = make_system(circle, ScalarField::zero());
    std::vector<ChartPoint> base;
    for (int i = 0; i < 16; ++i) base.push_back(circle.point({i / 16.0}));
    PotentialSamples z = evolve_potential(free, ScalarField::zero(), 0.6, base);
    for (double v : z.values) CHECK(v == 0.0);

    ScalarField fold = ScalarField::from_expression(circle, "cos1", 0.2);
    try {
      evolve_potential(free, fold, 1.0, base);
      FAIL("expected a fold");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNonDiffeomorphism);
    }
    CHECK_NOTHROW(evolve_potential(free, fold, 0.1, base));
    CHECK_THROWS_AS(evolve_potential(free, fold, 1.5, base), Error);
  }

  TEST_CASE("plane wave solves Hamilton-Jacobi") {
    Manifold line = Manifold::flat_torus({100.0});
    MechanicalSystem free = make_system(line, ScalarField::zero());
    const double a = 0.7;
    ScalarField f = plane_wave(a);
    std::vector<ChartPoint> base;
    for (int i = 0; i < 10; ++i) base.push_back(line.point({45.0 + i}));
    for (double t : {0.25, 1.0}) {
      PotentialSamples s = evolve_potential(free, f, t, base);
      for (std::size_t i = 0; i < base.size(); ++i) {
        double y = s.points[i].coords(0);
        CHECK(y == doctest::Approx(base[i].coords(0) + a * t).epsilon(1e-13));
        CHECK(s.values[i] == doctest::Approx(a * y - 0.5 * a * a * t).epsilon(1e-12));
        CHECK(s.covectors[i](0) == doctest::Approx(a).epsilon(1e-14));
      }
      HJValidation v = validate_hamilton_jacobi(free, f, t, base);
      CHECK(v.covector_error <= 1e-4);
      CHECK(v.hj_residual <= 1e-4);
    }
  }

  TEST_CASE("Hamilton-Jacobi validation on the circle") {
    Manifold circle = Manifold::flat_torus({1.0});
    MechanicalSystem pend = make_system(circle, ScalarField::from_expression(circle, "cos1", 0.02));
    ScalarField f = ScalarField::from_expression(circle, "cos1", 0.01);
    std::vector<ChartPoint> base;
    for (int i = 0; i < 32; ++i) base.push_back(circle.point({i / 32.0}));
    HJValidation v = validate_hamilton_jacobi(pend, f, 0.8, base);
    CHECK(v.samples == 32);
    CHECK(v.covector_error <= 1e-4);
    CHECK(v.hj_residual <= 1e-4);
  }

  TEST_CASE("weak duality along evolved potentials") {
    Manifold circle = Manifold::flat_torus({1.0});
    MechanicalSystem pend = make_system(circle, ScalarField::from_expression(circle, "cos1", 0.02));
    ScalarField f = ScalarField::from_expression(circle, "cos1", 0.01);
    std::vector<ChartPoint> base;
    for (int i = 0; i < 24; ++i) base.push_back(circle.point({i / 24.0}));
    PotentialSamples s = evolve_potential(pend, f, 1.0, base);
    double worst = -1e9;
    for (std::size_t i = 0; i < base.size(); ++i)
      for (std::size_t j = 0; j < base.size(); ++j) {
        double lhs = s.values[j] - f.value(circle, base[i]);
        worst = std::max(worst, lhs - cost(pend, base[i], s.points[j]));
      }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("optimality report") {
    Manifold torus = Manifold::flat_torus({1.0, 1.0});
    MechanicalSystem free = make_system(torus, ScalarField::zero());
    TransportReport zero = verify_optimality(free, ScalarField::zero(), 20, 7);
    CHECK(zero.monge_cost == 0.0);
    CHECK(zero.assignment_cost == 0.0);
    CHECK(zero.assignment_is_identity);
    CHECK(zero.seed == 7);

    TransportReport good = verify_optimality(free, ScalarField::from_expression(torus, "cos1", 0.01), 40, 3);
    CHECK(good.assignment_is_identity);
    CHECK(std::abs(good.optimality_gap) <= 1e-9);
    CHECK(good.assignment_cost <= good.monge_cost + 1e-12);
    CHECK(good.duality_gap <= 1e-6);

    TransportReport again = verify_optimality(free, ScalarField::from_expression(torus, "cos1", 0.01), 40, 3);
    CHECK(again.monge_cost == good.monge_cost);

    CHECK_THROWS_AS(verify_optimality(free, ScalarField::zero(), 513, 1), Error);
  }
}
