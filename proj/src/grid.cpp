#include "ctcert/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace ctcert {

namespace {
constexpr double kDiskGridRadius = 0.85;
}

SampleGrid make_grid(const Manifold& model, int resolution) {
  if (resolution < 2) throw Error(ErrorKind::kInvalidArgument, "grid resolution must be at least 2");
  SampleGrid grid;
  grid.resolution = resolution;
  std::ostringstream desc;
  const double pi = std::numbers::pi;

  switch (model.kind()) {
    case ManifoldKind::FlatTorus: {
      const int n = model.dim();
      long total = 1;
      for (int i = 0; i < n; ++i) total *= resolution;
      grid.points.reserve(total);
      for (long idx = 0; idx < total; ++idx) {
        ChartPoint x{0, Vector(n)};
        long rest = idx;
        for (int i = 0; i < n; ++i) {
          x.coords(i) = static_cast<double>(rest % resolution) * model.periods()[i] / resolution;
          rest /= resolution;
        }
        grid.points.push_back(x);
      }
      for (double p : model.periods()) grid.spacing = std::max(grid.spacing, p / resolution);
      desc << "torus lattice " << resolution << "^" << n;
      break;
    }
    case ManifoldKind::Sphere2: {
      const double r = model.radius();
      for (int i = 0; i < resolution; ++i) {
        double theta = (i + 0.5) * pi / resolution;
        for (int j = 0; j < 2 * resolution; ++j) {
          double phi = j * pi / resolution;
          Eigen::Vector3d X(r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                            r * std::cos(theta));
          grid.points.push_back(model.from_embedding(X));
        }
      }
      grid.spacing = pi * r / resolution;
      desc << "sphere latitude-longitude " << resolution << "x" << 2 * resolution;
      break;
    }
    case ManifoldKind::Hyperbolic2: {
      double h = 2.0 * kDiskGridRadius / (resolution - 1);
      for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
          ChartPoint x{0, Vector(2)};
          x.coords << -kDiskGridRadius + i * h, -kDiskGridRadius + j * h;
          if (x.coords.norm() <= kDiskGridRadius + 1e-12) grid.points.push_back(x);
        }
      double rho2 = kDiskGridRadius * kDiskGridRadius;
      grid.spacing = h * 2.0 * model.scale() / (1.0 - rho2);
      desc << "disk lattice " << resolution << "x" << resolution << " clipped to |u|<=" << kDiskGridRadius;
      break;
    }
  }
  grid.description = desc.str();
  return grid;
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<ChartPoint> sample_uniform(const Manifold& model, int count, std::uint64_t seed) {
  if (count < 0) throw Error(ErrorKind::kInvalidArgument, "sample count must be non-negative");
  UniformStream rng(seed);
  std::vector<ChartPoint> out;
  out.reserve(count);
  const double pi = std::numbers::pi;
  while (static_cast<int>(out.size()) < count) {
    switch (model.kind()) {
      case ManifoldKind::FlatTorus: {
        ChartPoint x{0, Vector(model.dim())};
        for (int i = 0; i < model.dim(); ++i) x.coords(i) = rng.next() * model.periods()[i];
        out.push_back(x);
        break;
      }
      case ManifoldKind::Sphere2: {
        double z = 2.0 * rng.next() - 1.0;
        double phi = 2.0 * pi * rng.next();
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        Eigen::Vector3d X = model.radius() * Eigen::Vector3d(rho * std::cos(phi), rho * std::sin(phi), z);
        out.push_back(model.from_embedding(X));
        break;
      }
      case ManifoldKind::Hyperbolic2: {
        // Rejection from the coordinate disk against the conformal area factor.
        double a = rng.next(), b = rng.next(), c = rng.next();
        double rad = kDiskGridRadius * std::sqrt(a);
        double s = rad * rad;
        double rho2 = kDiskGridRadius * kDiskGridRadius;
        double accept = std::pow((1.0 - rho2) / (1.0 - s), 2);
        if (c < accept) {
          ChartPoint x{0, Vector(2)};
          x.coords << rad * std::cos(2.0 * pi * b), rad * std::sin(2.0 * pi * b);
          out.push_back(x);
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace ctcert
