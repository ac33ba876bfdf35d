#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "geoknn/manifold.hpp"

namespace geoknn {

/// Points with quadrature weights, ordered row-major over the underlying grid.
struct WeightedGrid {
  std::vector<Point> points;
  std::vector<double> weights;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Midpoint latitude-longitude product grid on the sphere of radius R:
/// n_lat cells in colatitude, n_lon cells in longitude starting at -180,
/// weights R^2 sin(colatitude) dtheta dphi. Rows are latitudes from north
/// to south.
WeightedGrid lat_lon_grid(std::size_t n_lat, std::size_t n_lon, double radius = 1.0);

/// Product rule on the sphere: 100-point Gauss-Legendre in z = R cos(colatitude)
/// times n_lon equispaced longitudes. Exact for smooth integrands up to
/// rounding; rows run from south to north.
WeightedGrid gauss_sphere_grid(std::size_t n_lon, double radius = 1.0);

/// Midpoint product grid on the unit cylinder over angles [0, 2 pi) and the
/// axial window [axial_lo, axial_hi]. Rows are angles.
WeightedGrid cylinder_grid(std::size_t n_angle, std::size_t n_axial, double axial_lo, double axial_hi);

/// Near-uniform Fibonacci lattice on the sphere, restricted to the cap
/// <x, axis> >= min_cosine. `n_total` is the lattice size on the full sphere.
std::vector<Point> fibonacci_cap(std::size_t n_total, Coords axis, double min_cosine, double radius = 1.0);

double integrate(const WeightedGrid& grid, const std::function<double(Coords)>& f);

/// Integral of f over the geodesic ball B_r(center) of a 2-dimensional
/// manifold with respect to the Riemannian volume, computed in geodesic
/// polar coordinates: Gauss-Legendre in the radius and the trapezoid rule in
/// the angle, with the volume density theta as Jacobian. Requires r below
/// the injectivity radius.
double integrate_geodesic_ball(const Manifold& m, Coords center, double r, const std::function<double(Coords)>& f,
                               std::size_t angular_nodes = 128);

}  // namespace geoknn
