#include "geoknn/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "geoknn/errors.hpp"

namespace geoknn {

namespace {

constexpr double kPi = std::numbers::pi;

// Orthonormal basis of T_p M in ambient coordinates, for 2-dimensional M.
std::array<std::vector<double>, 2> tangent_basis(const Manifold& m, Coords p) {
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      return {std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}};
    case ManifoldKind::cylinder:
      return {std::vector<double>{-p[1], p[0], 0.0}, std::vector<double>{0.0, 0.0, 1.0}};
    case ManifoldKind::sphere: {
      const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      const std::array<double, 3> n{p[0] / r, p[1] / r, p[2] / r};
      // Seed with the axis least aligned with n.
      std::array<double, 3> seed{0.0, 0.0, 0.0};
      std::size_t axis = 0;
      for (std::size_t i = 1; i < 3; ++i) {
        if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
      }
      seed[axis] = 1.0;
      const double along = seed[0] * n[0] + seed[1] * n[1] + seed[2] * n[2];
      std::vector<double> e1{seed[0] - along * n[0], seed[1] - along * n[1], seed[2] - along * n[2]};
      const double len = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      for (double& c : e1) c /= len;
      std::vector<double> e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]};
      return {e1, e2};
    }
  }
  return {};
}

}  // namespace

WeightedGrid lat_lon_grid(std::size_t n_lat, std::size_t n_lon, double radius) {
  if (n_lat == 0 || n_lon == 0) throw InvalidArgument("lat-lon grid needs positive dimensions");
  WeightedGrid grid;
  grid.rows = n_lat;
  grid.cols = n_lon;
  grid.points.reserve(n_lat * n_lon);
  grid.weights.reserve(n_lat * n_lon);
  const double d_theta = kPi / static_cast<double>(n_lat);
  const double d_phi = 2.0 * kPi / static_cast<double>(n_lon);
  for (std::size_t i = 0; i < n_lat; ++i) {
    const double colat = (static_cast<double>(i) + 0.5) * d_theta;
    const double weight = radius * radius * std::sin(colat) * d_theta * d_phi;
    for (std::size_t j = 0; j < n_lon; ++j) {
      const double lon = -kPi + (static_cast<double>(j) + 0.5) * d_phi;
      grid.points.push_back(Point{radius * std::sin(colat) * std::cos(lon), radius * std::sin(colat) * std::sin(lon),
                                  radius * std::cos(colat)});
      grid.weights.push_back(weight);
    }
  }
  return grid;
}

WeightedGrid gauss_sphere_grid(std::size_t n_lon, double radius) {
  if (n_lon == 0) throw InvalidArgument("gauss_sphere_grid needs n_lon >= 1");
  using Rule = boost::math::quadrature::gauss<double, 100>;
  // Boost stores the nonnegative half of the symmetric rule.
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  std::vector<std::pair<double, double>> nodes;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nodes.emplace_back(x[i], w[i]);
    if (x[i] != 0.0) nodes.emplace_back(-x[i], w[i]);
  }
  std::sort(nodes.begin(), nodes.end());
  WeightedGrid g;
  g.rows = nodes.size();
  g.cols = n_lon;
  const double dphi = 2.0 * kPi / static_cast<double>(n_lon);
  for (const auto& [z, wz] : nodes) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (std::size_t j = 0; j < n_lon; ++j) {
      const double phi = -kPi + (static_cast<double>(j) + 0.5) * dphi;
      g.points.push_back(Point{radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z});
      g.weights.push_back(radius * radius * wz * dphi);
    }
  }
  return g;
}

WeightedGrid cylinder_grid(std::size_t n_angle, std::size_t n_axial, double axial_lo, double axial_hi) {
  if (n_angle == 0 || n_axial == 0) throw InvalidArgument("cylinder grid needs positive dimensions");
  if (!(axial_hi > axial_lo)) throw InvalidArgument("cylinder grid needs axial_hi > axial_lo");
  WeightedGrid grid;
  grid.rows = n_angle;
  grid.cols = n_axial;
  const double d_angle = 2.0 * kPi / static_cast<double>(n_angle);
  const double d_axial = (axial_hi - axial_lo) / static_cast<double>(n_axial);
  for (std::size_t i = 0; i < n_angle; ++i) {
    const double angle = (static_cast<double>(i) + 0.5) * d_angle;
    for (std::size_t j = 0; j < n_axial; ++j) {
      const double axial = axial_lo + (static_cast<double>(j) + 0.5) * d_axial;
      grid.points.push_back(cylinder_point(angle, axial));
      grid.weights.push_back(d_angle * d_axial);
    }
  }
  return grid;
}

std::vector<Point> fibonacci_cap(std::size_t n_total, Coords axis, double min_cosine, double radius) {
  if (n_total == 0) throw InvalidArgument("Fibonacci lattice needs at least one point");
  if (axis.size() != 3) throw InvalidArgument("cap axis must be a 3-vector");
  const double axis_norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Point> out;
  for (std::size_t i = 0; i < n_total; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n_total);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    const double x = rho * std::cos(phi);
    const double y = rho * std::sin(phi);
    const double cosine = (x * axis[0] + y * axis[1] + z * axis[2]) / axis_norm;
    if (cosine >= min_cosine) out.push_back(Point{radius * x, radius * y, radius * z});
  }
  return out;
}

double integrate(const WeightedGrid& grid, const std::function<double(Coords)>& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) total += grid.weights[i] * f(grid.points[i]);
  return total;
}

double integrate_geodesic_ball(const Manifold& m, Coords center, double r, const std::function<double(Coords)>& f,
                               std::size_t angular_nodes) {
  if (m.dim() != 2) throw InvalidArgument("geodesic ball quadrature supports 2-dimensional manifolds");
  if (!(r > 0.0) || !(r < m.injectivity_radius())) {
    throw InvalidArgument("geodesic ball radius must lie in (0, injectivity radius)");
  }
  if (angular_nodes == 0) throw InvalidArgument("angular_nodes must be positive");
  const auto basis = tangent_basis(m, center);
  const double d_phi = 2.0 * kPi / static_cast<double>(angular_nodes);
  std::vector<double> v(m.ambient_dim());
  auto ring = [&](double rho) {
    double sum = 0.0;
    for (std::size_t a = 0; a < angular_nodes; ++a) {
      const double phi = static_cast<double>(a) * d_phi;
      for (std::size_t c = 0; c < v.size(); ++c) v[c] = rho * (std::cos(phi) * basis[0][c] + std::sin(phi) * basis[1][c]);
      const Point q = exp_map(m, center, v);
      sum += f(q) * volume_density_at(m, rho);
    }
    return sum * d_phi * rho;
  };
  return boost::math::quadrature::gauss<double, 40>::integrate(ring, 0.0, r);
}

}  // namespace geoknn
