#include "ctcert/geometry.hpp"
#include "ctcert/mechanics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace ctcert;

namespace {

const double pi = std::numbers::pi;

// Stereographic parametrization written out independently of the library.
Eigen::Vector3d stereo(int chart, const Eigen::Vector2d& u, double r) {
  double s = u.squaredNorm();
  double z = chart == 0 ? (s - 1.0) : (1.0 - s);
  return r * Eigen::Vector3d(2.0 * u(0), 2.0 * u(1), z) / (1.0 + s);
}

// Pullback metric from difference quotients of the embedding.
Eigen::Matrix2d pullback(int chart, const Eigen::Vector2d& u, double r) {
  const double h = 1e-5;
  Eigen::Matrix<double, 3, 2> d;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d e = Eigen::Vector2d::Unit(i) * h;
    d.col(i) = (stereo(chart, u + e, r) - stereo(chart, u - e, r)) / (2.0 * h);
  }
  return d.transpose() * d;
}

// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij) with central differences of metric_at.
Christoffel christoffel_fd(const Manifold& m, const ChartPoint& x) {
  const int n = m.dim();
  const double h = 1e-5;
  std::vector<Matrix> dg(n);
  for (int k = 0; k < n; ++k) {
    ChartPoint a = x, b = x;
    a.coords(k) += h;
    b.coords(k) -= h;
    dg[k] = (metric_at(m, a).g - metric_at(m, b).g) / (2.0 * h);
  }
  Matrix ginv = metric_at(m, x).g_inverse;
  Christoffel out(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          out[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return out;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("model constants") {
    CHECK(Manifold::flat_torus({1.0, 2.0}).curvature_bound() == 0.0);
    CHECK(Manifold::sphere(2.0).curvature_bound() == doctest::Approx(0.25));
    CHECK(Manifold::hyperbolic(1.0).curvature_bound() == -1.0);
    CHECK(Manifold::sphere().compact());
    CHECK_FALSE(Manifold::hyperbolic().compact());
  }

  TEST_CASE("metric examples") {
    Manifold torus = Manifold::flat_torus({1.0, 1.0});
    CHECK((metric_at(torus, torus.point({0.3, 0.7})).g - Matrix::Identity(2, 2)).norm() == 0.0);

    Manifold disk = Manifold::hyperbolic();
    Matrix g = metric_at(disk, disk.point({0.5, 0.0})).g;
    CHECK(g(0, 0) == doctest::Approx(64.0 / 9.0).epsilon(1e-14));
    CHECK(g(1, 1) == doctest::Approx(64.0 / 9.0).epsilon(1e-14));
    CHECK(g(0, 1) == 0.0);

    CHECK_THROWS_AS(metric_at(disk, disk.point({0.8, 0.7})), Error);
  }

  TEST_CASE("sphere metric equals the pullback of the round metric") {
    testing_support::Rng rng(1);
    for (double r : {1.0, 2.5})
      for (int trial = 0; trial < 20; ++trial) {
        int chart = rng.integer(0, 1);
        Eigen::Vector2d u(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4));
        Manifold s = Manifold::sphere(r);
        Matrix g = metric_at(s, s.point({u(0), u(1)}, chart)).g;
        double expect = 4.0 * r * r / std::pow(1.0 + u.squaredNorm(), 2);
        CHECK(std::abs(g(0, 0) - expect) < 1e-12 * expect);
        CHECK((Eigen::Matrix2d(g) - pullback(chart, u, r)).cwiseAbs().maxCoeff() < 1e-8 * expect);
      }
  }

  TEST_CASE("Christoffel symbols match differences of the metric") {
    Manifold torus = Manifold::flat_torus({1.0, 1.0});
    for (const Matrix& m : christoffel(torus, torus.point({0.2, 0.4}))) CHECK(m.norm() == 0.0);

    Manifold sphere = Manifold::sphere();
    Manifold disk = Manifold::hyperbolic();
    for (auto [model, x] : {std::pair{sphere, sphere.point({0.3, 0.0})}, std::pair{disk, disk.point({0.2, 0.1})},
                            std::pair{sphere, sphere.point({-0.7, 1.1}, 1)}}) {
      Christoffel a = christoffel(model, x), b = christoffel_fd(model, x);
      for (int k = 0; k < 2; ++k) CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("curvature examples and constant-curvature identity") {
    Manifold torus = Manifold::flat_torus({1.0, 1.0, 1.0});
    CHECK(riemann_curvature(torus, torus.point({0.1, 0.2, 0.3}), vec({1, 2, 3}), vec({0, 1, 0}), vec({1, 0, 0}))
              .norm() == 0.0);

    Manifold sphere = Manifold::sphere();
    ChartPoint x = sphere.point({0.4, -0.2});
    Matrix frame = orthonormal_frame(sphere, x);
    Vector u = frame.col(0), v = frame.col(1);
    Vector r = riemann_curvature(sphere, x, u, v, u);
    CHECK((r - v).norm() < 1e-12);
    CHECK(inner(metric_at(sphere, x).g, r, v) == doctest::Approx(1.0).epsilon(1e-12));

    testing_support::Rng rng(2);
    for (auto model : {Manifold::sphere(1.7), Manifold::hyperbolic(1.3), Manifold::hyperbolic(1.0)}) {
      double k = model.curvature_bound();
      for (int trial = 0; trial < 20; ++trial) {
        ChartPoint p = model.point({rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)});
        Vector a = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        Vector b = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        Matrix g = metric_at(model, p).g;
        double area = inner(g, a, a) * inner(g, b, b) - std::pow(inner(g, a, b), 2);
        if (area < 1e-6) continue;
        double sec = inner(g, riemann_curvature(model, p, a, b, a), b) / area;
        CHECK(std::abs(sec - k) < 1e-8);
        CHECK(sectional_curvature(model, p, a, b) == doctest::Approx(k).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("tangent vectors at different base points are rejected") {
    Manifold sphere = Manifold::sphere();
    TangentVector a{sphere.point({0.1, 0.0}), vec({1, 0})};
    TangentVector b{sphere.point({0.2, 0.0}), vec({0, 1})};
    CHECK_THROWS_AS(riemann_curvature(sphere, a, b, a), Error);
  }

  TEST_CASE("chart transitions carry metric, connection and curvature") {
    Manifold sphere = Manifold::sphere();
    testing_support::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      double rad = rng.uniform(0.7, 1.4), ang = rng.uniform(0, 2 * pi);
      ChartPoint x = sphere.point({rad * std::cos(ang), rad * std::sin(ang)});
      Manifold::Transition tr = sphere.to_chart(x, 1);
      const Matrix& j = tr.jacobian;
      Matrix g0 = metric_at(sphere, x).g, g1 = metric_at(sphere, tr.point).g;
      CHECK((j.transpose() * g1 * j - g0).cwiseAbs().maxCoeff() < 1e-8 * g0.norm());

      Vector u = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      Vector v = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      Vector w = vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      Vector r0 = riemann_curvature(sphere, x, u, v, w);
      Vector r1 = riemann_curvature(sphere, tr.point, j * u, j * v, j * w);
      CHECK((j * r0 - r1).norm() < 1e-8 * std::max(1.0, r1.norm()));

      // The covariant derivative of the coordinate field u along v transforms
      // with the second derivative of the transition map.
      const double h = 1e-5;
      Vector gu0 = Vector::Zero(2), gu1 = Vector::Zero(2);
      Christoffel c0 = christoffel(sphere, x), c1 = christoffel(sphere, tr.point);
      for (int k = 0; k < 2; ++k) {
        gu0(k) = u.dot(c0[k] * v);
        gu1(k) = (j * u).dot(c1[k] * (j * v));
      }
      ChartPoint xp = x, xm = x;
      xp.coords += h * v;
      xm.coords -= h * v;
      Vector second = (sphere.to_chart(xp, 1).jacobian - sphere.to_chart(xm, 1).jacobian) / (2 * h) * u;
      CHECK((j * gu0 - second - gu1).norm() < 1e-6 * std::max(1.0, gu1.norm()));
    }
  }

  TEST_CASE("orthonormal frames") {
    Manifold torus = Manifold::flat_torus({1.0, 1.0});
    CHECK((orthonormal_frame(torus, torus.point({0.5, 0.5})) - Matrix::Identity(2, 2)).norm() < 1e-15);

    Manifold sphere = Manifold::sphere();
    ChartPoint o = sphere.point({0.0, 0.0});
    Vector first = vec({1, 1});
    Matrix f = orthonormal_frame(sphere, o, &first);
    Matrix g = metric_at(sphere, o).g;
    CHECK((f.transpose() * g * f - Matrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(f(0, 0) == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK(f(1, 0) == doctest::Approx(1.0 / std::sqrt(8.0)));

    Vector zero = Vector::Zero(2);
    CHECK_THROWS_AS(orthonormal_frame(sphere, o, &zero), Error);

    Manifold disk = Manifold::hyperbolic(2.0);
    ChartPoint p = disk.point({0.3, -0.4});
    Vector d = vec({0.2, 0.9});
    Matrix fd = orthonormal_frame(disk, p, &d);
    Matrix gd = metric_at(disk, p).g;
    CHECK((fd.transpose() * gd * fd - Matrix::Identity(2, 2)).norm() < 1e-12);
  }

  TEST_CASE("distance examples") {
    Manifold circle = Manifold::flat_torus({1.0});
    CHECK(distance(circle, circle.point({0.1}), circle.point({0.9})) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(distance(circle, circle.point({0.3}), circle.point({0.3})) == 0.0);

    Manifold sphere = Manifold::sphere();
    ChartPoint a = sphere.point({0.4, 0.3});
    ChartPoint b = sphere.from_embedding(-sphere.embed(a));
    CHECK(distance(sphere, a, b) == doctest::Approx(pi).epsilon(1e-12));

    testing_support::Rng rng(4);
    Manifold disk = Manifold::hyperbolic(1.5);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::Vector2d u(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
      Eigen::Vector2d v(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
      double expect =
          1.5 * std::acosh(1.0 + 2.0 * (u - v).squaredNorm() / ((1 - u.squaredNorm()) * (1 - v.squaredNorm())));
      CHECK(distance(disk, disk.point({u(0), u(1)}), disk.point({v(0), v(1)})) ==
            doctest::Approx(expect).epsilon(1e-12));

      Eigen::Vector2d su(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4));
      Eigen::Vector2d sv(rng.uniform(-1.4, 1.4), rng.uniform(-1.4, 1.4));
      int ca = rng.integer(0, 1), cb = rng.integer(0, 1);
      Eigen::Vector3d ea = stereo(ca, su, 1.0), eb = stereo(cb, sv, 1.0);
      double angle = std::atan2(ea.cross(eb).norm(), ea.dot(eb));
      CHECK(distance(sphere, sphere.point({su(0), su(1)}, ca), sphere.point({sv(0), sv(1)}, cb)) ==
            doctest::Approx(angle).epsilon(1e-9));
    }
  }

  TEST_CASE("half squared distance is the minimal action of the free system") {
    testing_support::Rng rng(5);
    for (auto model : {Manifold::sphere(), Manifold::hyperbolic(), Manifold::flat_torus({1.0, 1.0})}) {
      MechanicalSystem sys = make_system(model, ScalarField::zero());
      for (int trial = 0; trial < 6; ++trial) {
        ChartPoint x = model.normalize(model.point({rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}));
        ChartPoint y = model.normalize(model.point({rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)}));
        double d = distance(model, x, y);
        CHECK(shoot(sys, x, y).cost == doctest::Approx(0.5 * d * d).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("normalization keeps coordinates in range") {
    Manifold torus = Manifold::flat_torus({1.0, 2.0});
    ChartPoint w = torus.normalize(torus.point({-0.25, 4.5}));
    CHECK(w.coords(0) == doctest::Approx(0.75));
    CHECK(w.coords(1) == doctest::Approx(0.5));

    Manifold sphere = Manifold::sphere();
    ChartPoint s = sphere.normalize(sphere.point({2.0, 0.0}));
    CHECK(s.chart == 1);
    CHECK(s.coords.norm() <= Manifold::kSphereSwitchRadius);
    CHECK((sphere.embed(s) - stereo(0, Eigen::Vector2d(2.0, 0.0), 1.0)).norm() < 1e-14);
  }
}
