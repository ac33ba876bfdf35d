#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoknn {

/// Read-only view over the embedding coordinates of one point.
using Coords = std::span<const double>;

/// Tangent vectors are expressed in the ambient (embedding) coordinates.
using TangentVector = std::vector<double>;

/// A point on a manifold, stored in embedding coordinates: length d for
/// R^d, length 3 for the sphere and for the cylinder, whose points are
/// (cos r, sin r, s).
struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  operator Coords() const noexcept { return coords; }
  std::size_t size() const noexcept { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const Point&) const = default;
};

enum class ManifoldKind { euclidean, sphere, cylinder };

/// One of the supported Riemannian manifolds together with the constants the
/// estimators need: intrinsic dimension, injectivity radius and scalar
/// curvature.
class Manifold {
 public:
  static Manifold euclidean(int dim);
  static Manifold sphere(double radius = 1.0);
  /// Unit-radius cylinder S^1 x R with the metric induced from R^3.
  static Manifold cylinder();

  /// Parses "euclidean:d", "sphere:R" (or "sphere") and "cylinder".
  static Manifold parse(std::string_view text);

  ManifoldKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  std::size_t ambient_dim() const noexcept;
  /// Sphere radius; 1 for the cylinder, unused for R^d.
  double radius() const noexcept { return radius_; }
  /// +infinity for R^d.
  double injectivity_radius() const noexcept;
  double scalar_curvature() const noexcept;
  bool has_finite_injectivity_radius() const noexcept { return kind_ != ManifoldKind::euclidean; }

  std::string describe() const;

  bool operator==(const Manifold&) const = default;

 private:
  Manifold(ManifoldKind kind, int dim, double radius) : kind_(kind), dim_(dim), radius_(radius) {}

  ManifoldKind kind_;
  int dim_;
  double radius_;
};

/// Throws InvalidArgument unless p has the ambient dimension of m and lies on
/// m (sphere: |p| = R, cylinder: x^2 + y^2 = 1, both to 1e-9 relative).
void validate_point(const Manifold& m, Coords p);

/// Geodesic distance. The sphere uses R*acos(<p,q>/R^2) with the ratio
/// clamped to [-1, 1]; the cylinder wraps the angular difference to [-pi, pi].
double distance(const Manifold& m, Coords p, Coords q);

/// Straight-line distance in the embedding space. Never exceeds distance().
double chord_distance(Coords p, Coords q);

/// Volume density function theta_p(q). Requires distance(p, q) to be below
/// the injectivity radius; throws ContractError otherwise.
double volume_density(const Manifold& m, Coords p, Coords q);

/// Same as volume_density() when the geodesic distance is already known.
double volume_density_at(const Manifold& m, double geodesic_distance);

Point exp_map(const Manifold& m, Coords p, std::span<const double> v);

/// Inverse of exp_map, |log_map(p, q)| = distance(p, q). Throws ContractError
/// when q is on the cut locus of p (antipode on the sphere, opposite
/// generator line on the cylinder).
TangentVector log_map(const Manifold& m, Coords p, Coords q);

/// Volume of a geodesic ball of radius r. Sphere and cylinder closed forms
/// hold up to the injectivity radius (r = pi R on the sphere gives the total
/// area).
double geodesic_ball_volume(const Manifold& m, double r);

/// Lebesgue measure of the unit ball in R^d, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(int d);

/// Surface area of the unit sphere S^{d-1} in R^d.
double unit_sphere_surface(int d);

// Coordinate helpers.
Point sphere_point_from_lonlat(double lon_deg, double lat_deg, double radius = 1.0);
/// Returns {longitude, latitude} in degrees, longitude in [-180, 180].
std::pair<double, double> lonlat_from_sphere_point(Coords p);
Point cylinder_point(double angle_rad, double axial);
/// Angle in [0, 2 pi).
double cylinder_angle(Coords p);

}  // namespace geoknn
