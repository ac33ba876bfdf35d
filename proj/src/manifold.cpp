#include "geoknn/manifold.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "geoknn/errors.hpp"

namespace geoknn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPointTolerance = 1e-9;

double dot(Coords a, Coords b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(Coords a) { return std::sqrt(dot(a, a)); }

void check_dims(const Manifold& m, Coords p) {
  if (p.size() != m.ambient_dim()) {
    throw InvalidArgument(fmt::format("point has {} coordinates, {} expects {}", p.size(),
                                      m.describe(), m.ambient_dim()));
  }
}

// Signed angle from the (x, y) part of p to that of q, in [-pi, pi].
double cylinder_angle_difference(Coords p, Coords q) {
  return std::atan2(p[0] * q[1] - p[1] * q[0], p[0] * q[0] + p[1] * q[1]);
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument(fmt::format("cannot parse {} from '{}'", what, text));
  }
  return value;
}

}  // namespace

Manifold Manifold::euclidean(int dim) {
  if (dim < 1) throw InvalidArgument("Euclidean dimension must be >= 1");
  return {ManifoldKind::euclidean, dim, 1.0};
}

Manifold Manifold::sphere(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("sphere radius must be positive and finite");
  }
  return {ManifoldKind::sphere, 2, radius};
}

Manifold Manifold::cylinder() { return {ManifoldKind::cylinder, 2, 1.0}; }

Manifold Manifold::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (name == "euclidean") {
    if (arg.empty()) throw InvalidArgument("euclidean manifold needs a dimension, e.g. euclidean:2");
    const double d = parse_number(arg, "dimension");
    if (d != std::floor(d)) throw InvalidArgument("Euclidean dimension must be an integer");
    return euclidean(static_cast<int>(d));
  }
  if (name == "sphere") return sphere(arg.empty() ? 1.0 : parse_number(arg, "radius"));
  if (name == "cylinder") {
    if (!arg.empty()) throw InvalidArgument("cylinder takes no parameter");
    return cylinder();
  }
  throw InvalidArgument(fmt::format("unknown manifold '{}'", text));
}

std::size_t Manifold::ambient_dim() const noexcept {
  return kind_ == ManifoldKind::euclidean ? static_cast<std::size_t>(dim_) : 3;
}

double Manifold::injectivity_radius() const noexcept {
  switch (kind_) {
    case ManifoldKind::euclidean:
      return std::numeric_limits<double>::infinity();
    case ManifoldKind::sphere:
      return kPi * radius_;
    case ManifoldKind::cylinder:
      return kPi;
  }
  return 0.0;
}

double Manifold::scalar_curvature() const noexcept {
  if (kind_ == ManifoldKind::sphere) return dim_ * (dim_ - 1) / (radius_ * radius_);
  return 0.0;
}

std::string Manifold::describe() const {
  switch (kind_) {
    case ManifoldKind::euclidean:
      return fmt::format("euclidean:{}", dim_);
    case ManifoldKind::sphere:
      return fmt::format("sphere:{}", radius_);
    case ManifoldKind::cylinder:
      return "cylinder";
  }
  return {};
}

void validate_point(const Manifold& m, Coords p) {
  check_dims(m, p);
  for (double c : p) {
    if (!std::isfinite(c)) throw InvalidArgument("point has non-finite coordinates");
  }
  if (m.kind() == ManifoldKind::sphere) {
    const double r = norm(p);
    if (std::abs(r - m.radius()) > kPointTolerance * m.radius()) {
      throw InvalidArgument(fmt::format("point with norm {} is not on {}", r, m.describe()));
    }
  } else if (m.kind() == ManifoldKind::cylinder) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    if (std::abs(r2 - 1.0) > kPointTolerance) {
      throw InvalidArgument(fmt::format("point with x^2+y^2 = {} is not on the unit cylinder", r2));
    }
  }
}

double distance(const Manifold& m, Coords p, Coords q) {
  check_dims(m, p);
  check_dims(m, q);
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      return chord_distance(p, q);
    case ManifoldKind::sphere: {
      // atan2 form of R acos(<p,q>/R^2): same value, but accurate for nearby
      // points where acos loses half the digits.
      const double cx = p[1] * q[2] - p[2] * q[1];
      const double cy = p[2] * q[0] - p[0] * q[2];
      const double cz = p[0] * q[1] - p[1] * q[0];
      const double r = m.radius();
      return r * std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(p, q));
    }
    case ManifoldKind::cylinder: {
      const double angular = cylinder_angle_difference(p, q);
      const double axial = p[2] - q[2];
      return std::sqrt(angular * angular + axial * axial);
    }
  }
  return 0.0;
}

double chord_distance(Coords p, Coords q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = p[i] - q[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double volume_density_at(const Manifold& m, double geodesic_distance) {
  if (!(geodesic_distance < m.injectivity_radius())) {
    throw ContractError(fmt::format("volume density undefined at distance {} on {} (injectivity radius {})",
                                    geodesic_distance, m.describe(), m.injectivity_radius()));
  }
  if (m.kind() != ManifoldKind::sphere) return 1.0;
  // theta_p(p) = 1 exactly.
  if (geodesic_distance == 0.0) return 1.0;
  const double r = m.radius();
  return r * std::abs(std::sin(geodesic_distance / r)) / geodesic_distance;
}

double volume_density(const Manifold& m, Coords p, Coords q) {
  return volume_density_at(m, distance(m, p, q));
}

Point exp_map(const Manifold& m, Coords p, std::span<const double> v) {
  check_dims(m, p);
  if (v.size() != m.ambient_dim()) throw InvalidArgument("tangent vector has wrong dimension");
  Point out;
  out.coords.resize(p.size());
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      for (std::size_t i = 0; i < p.size(); ++i) out.coords[i] = p[i] + v[i];
      break;
    case ManifoldKind::sphere: {
      const double r = m.radius();
      const double len = norm(v);
      if (len == 0.0) {
        out.coords.assign(p.begin(), p.end());
        break;
      }
      const double c = std::cos(len / r);
      const double s = r * std::sin(len / r) / len;
      for (std::size_t i = 0; i < 3; ++i) out.coords[i] = c * p[i] + s * v[i];
      break;
    }
    case ManifoldKind::cylinder: {
      // Tangent basis at p: e_angle = (-sin r, cos r, 0), e_axial = (0, 0, 1).
      const double angular = -p[1] * v[0] + p[0] * v[1];
      const double angle = std::atan2(p[1], p[0]) + angular;
      out.coords = {std::cos(angle), std::sin(angle), p[2] + v[2]};
      break;
    }
  }
  return out;
}

TangentVector log_map(const Manifold& m, Coords p, Coords q) {
  check_dims(m, p);
  check_dims(m, q);
  TangentVector v(p.size(), 0.0);
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      for (std::size_t i = 0; i < p.size(); ++i) v[i] = q[i] - p[i];
      break;
    case ManifoldKind::sphere: {
      const double r = m.radius();
      const double d = distance(m, p, q);
      if (!(d < m.injectivity_radius())) throw ContractError("log_map: q is the antipode of p");
      const double along = dot(p, q) / (r * r);
      for (std::size_t i = 0; i < 3; ++i) v[i] = q[i] - along * p[i];
      const double len = norm(v);
      if (len == 0.0) return TangentVector(3, 0.0);
      for (double& c : v) c *= d / len;
      break;
    }
    case ManifoldKind::cylinder: {
      const double angular = cylinder_angle_difference(p, q);
      if (std::abs(angular) >= kPi) throw ContractError("log_map: q lies on the cut locus of p");
      v = {-p[1] * angular, p[0] * angular, q[2] - p[2]};
      break;
    }
  }
  return v;
}

double geodesic_ball_volume(const Manifold& m, double r) {
  if (!(r > 0.0)) throw InvalidArgument("geodesic ball radius must be positive");
  switch (m.kind()) {
    case ManifoldKind::euclidean:
      return unit_ball_volume(m.dim()) * std::pow(r, m.dim());
    case ManifoldKind::sphere: {
      const double big_r = m.radius();
      if (r > kPi * big_r) throw InvalidArgument("geodesic ball radius exceeds pi R on the sphere");
      // 1 - cos x = 2 sin^2(x/2), stable for small x.
      const double half = std::sin(r / (2.0 * big_r));
      return 4.0 * kPi * big_r * big_r * half * half;
    }
    case ManifoldKind::cylinder:
      if (r > kPi) throw InvalidArgument("geodesic ball radius exceeds pi on the cylinder");
      return kPi * r * r;
  }
  return 0.0;
}

double unit_ball_volume(int d) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double unit_sphere_surface(int d) {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  return d * unit_ball_volume(d);
}

Point sphere_point_from_lonlat(double lon_deg, double lat_deg, double radius) {
  const double lon = lon_deg * kPi / 180.0;
  const double lat = lat_deg * kPi / 180.0;
  return Point{radius * std::cos(lat) * std::cos(lon), radius * std::cos(lat) * std::sin(lon),
               radius * std::sin(lat)};
}

std::pair<double, double> lonlat_from_sphere_point(Coords p) {
  const double r = norm(p);
  const double lat = std::asin(std::clamp(p[2] / r, -1.0, 1.0));
  const double lon = std::atan2(p[1], p[0]);
  return {lon * 180.0 / kPi, lat * 180.0 / kPi};
}

Point cylinder_point(double angle_rad, double axial) {
  return Point{std::cos(angle_rad), std::sin(angle_rad), axial};
}

double cylinder_angle(Coords p) {
  double a = std::atan2(p[1], p[0]);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

}  // namespace geoknn
