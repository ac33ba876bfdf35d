#include "geoknn/models.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "geoknn/errors.hpp"
#include "geoknn/quadrature.hpp"

namespace geoknn {

namespace {

constexpr double kPi = std::numbers::pi;

double dot3(Coords a, Coords b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

class VonMisesFisher final : public DensityModel {
 public:
  VonMisesFisher(const Point& mu, double kappa) : mu_(mu), kappa_(kappa) {
    if (mu.size() != 3) throw InvalidArgument("vMF mean direction must be a 3-vector");
    if (std::abs(std::sqrt(dot3(mu, mu)) - 1.0) > 1e-9) throw InvalidArgument("vMF mean direction must be a unit vector");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("vMF concentration must be positive");
    // kappa e^{kappa (t - 1)} / (2 pi (1 - e^{-2 kappa})) == C_3(kappa) e^{kappa t}
    log_scale_ = std::log(kappa_ / (2.0 * kPi * -std::expm1(-2.0 * kappa_)));
    // Orthonormal complement of mu.
    std::size_t axis = 0;
    for (std::size_t i = 1; i < 3; ++i) {
      if (std::abs(mu_[i]) < std::abs(mu_[axis])) axis = i;
    }
    std::array<double, 3> seed{0.0, 0.0, 0.0};
    seed[axis] = 1.0;
    const double along = seed[0] * mu_[0] + seed[1] * mu_[1] + seed[2] * mu_[2];
    for (std::size_t i = 0; i < 3; ++i) e1_[i] = seed[i] - along * mu_[i];
    const double len = std::sqrt(e1_[0] * e1_[0] + e1_[1] * e1_[1] + e1_[2] * e1_[2]);
    for (double& c : e1_) c /= len;
    e2_ = {mu_[1] * e1_[2] - mu_[2] * e1_[1], mu_[2] * e1_[0] - mu_[0] * e1_[2], mu_[0] * e1_[1] - mu_[1] * e1_[0]};
  }

  std::string name() const override { return "vmf"; }
  Manifold manifold() const override { return Manifold::sphere(1.0); }

  double density(Coords p) const override { return std::exp(log_scale_ + kappa_ * (dot3(p, mu_) - 1.0)); }

  SampleSet sample(Rng& rng, std::size_t n) const override {
    std::vector<double> flat;
    flat.reserve(3 * n);
    const double floor = std::exp(-2.0 * kappa_);
    for (std::size_t i = 0; i < n; ++i) {
      // Inverse CDF of w = <x, mu>, density proportional to e^{kappa w} on [-1, 1].
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      const double w = std::clamp(1.0 + std::log(u + (1.0 - u) * floor) / kappa_, -1.0, 1.0);
      const double phi = 2.0 * kPi * uniform01(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
      const double c1 = s * std::cos(phi);
      const double c2 = s * std::sin(phi);
      double x[3];
      for (std::size_t a = 0; a < 3; ++a) x[a] = w * mu_[a] + c1 * e1_[a] + c2 * e2_[a];
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      for (double c : x) flat.push_back(c / r);
    }
    return SampleSet(manifold(), std::move(flat));
  }

  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"mu_x", mu_[0]}, {"mu_y", mu_[1]}, {"mu_z", mu_[2]}, {"kappa", kappa_}};
  }

 private:
  Point mu_;
  double kappa_;
  double log_scale_;
  std::array<double, 3> e1_{};
  std::array<double, 3> e2_{};
};

class UniformSphere final : public DensityModel {
 public:
  std::string name() const override { return "uniform"; }
  Manifold manifold() const override { return Manifold::sphere(1.0); }
  double density(Coords) const override { return 1.0 / (4.0 * kPi); }

  SampleSet sample(Rng& rng, std::size_t n) const override {
    std::vector<double> flat;
    flat.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      double z[3];
      double r = 0.0;
      do {
        for (double& c : z) c = standard_normal(rng);
        r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
      } while (r == 0.0);
      for (double c : z) flat.push_back(c / r);
    }
    return SampleSet(manifold(), std::move(flat));
  }

  std::vector<std::pair<std::string, double>> parameters() const override { return {}; }
};

class MardiaSutton final : public DensityModel {
 public:
  explicit MardiaSutton(const MardiaSuttonParams& p) : p_(p) {
    if (!(p.kappa > 0.0)) throw InvalidArgument("Mardia-Sutton concentration must be positive");
    if (!(p.sd > 0.0)) throw InvalidArgument("Mardia-Sutton axial sd must be positive");
    angular_norm_ = 1.0 / (2.0 * kPi * bessel_i0(p.kappa));
  }

  std::string name() const override { return "mardia-sutton"; }
  Manifold manifold() const override { return Manifold::cylinder(); }

  double density(Coords p) const override {
    const double angle = std::atan2(p[1], p[0]);
    const double angular = angular_norm_ * std::exp(p_.kappa * std::cos(angle - p_.mean_angle));
    const double z = (p[2] - p_.intercept - p_.slope * std::cos(angle)) / p_.sd;
    const double axial = std::exp(-0.5 * z * z) / (p_.sd * std::sqrt(2.0 * kPi));
    return angular * axial;
  }

  SampleSet sample(Rng& rng, std::size_t n) const override {
    std::vector<double> flat;
    flat.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = von_mises_angle(rng, p_.mean_angle, p_.kappa);
      const double c = std::cos(angle);
      const double axial = p_.intercept + p_.slope * c + p_.sd * standard_normal(rng);
      flat.push_back(c);
      flat.push_back(std::sin(angle));
      flat.push_back(axial);
    }
    return SampleSet(manifold(), std::move(flat));
  }

  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"mean_angle", p_.mean_angle}, {"kappa", p_.kappa}, {"intercept", p_.intercept},
            {"slope", p_.slope},           {"sd", p_.sd}};
  }

 private:
  MardiaSuttonParams p_;
  double angular_norm_;
};

}  // namespace

double von_mises_angle(Rng& rng, double mu, double kappa) {
  if (!(kappa >= 0.0)) throw InvalidArgument("von Mises concentration must be nonnegative");
  if (kappa < 1e-8) return mu + kPi * (2.0 * uniform01(rng) - 1.0);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = uniform01(rng);
    const double u2 = 1.0 - uniform01(rng);  // (0, 1]
    const double u3 = uniform01(rng);
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double theta = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 > 0.5 ? mu + theta : mu - theta;
    }
  }
}

MardiaSuttonParams MardiaSuttonParams::standard() { return {kPi, 5.0, 1.0, 2.0 * std::sqrt(5.0), 1.0}; }

ModelPtr von_mises_fisher(const Point& mu, double kappa) { return std::make_shared<VonMisesFisher>(mu, kappa); }

ModelPtr uniform_sphere() { return std::make_shared<UniformSphere>(); }

ModelPtr mardia_sutton(const MardiaSuttonParams& params) { return std::make_shared<MardiaSutton>(params); }

ModelPtr model_by_name(const std::string& name, double kappa) {
  if (name == "vmf") return von_mises_fisher(Point{0.0, 0.0, 1.0}, kappa > 0.0 ? kappa : 3.0);
  if (name == "uniform") return uniform_sphere();
  if (name == "mardia-sutton") {
    auto p = MardiaSuttonParams::standard();
    if (kappa > 0.0) p.kappa = kappa;
    return mardia_sutton(p);
  }
  throw InvalidArgument(fmt::format("unknown model '{}' (expected vmf, uniform or mardia-sutton)", name));
}

double bessel_i0(double x) {
  // sum_m (x^2/4)^m / (m!)^2
  const double q = x * x / 4.0;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<double>(m) * static_cast<double>(m));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double asymptotic_sigma_sq(const DensityModel& model, Coords p, const Kernel& kernel, KernelScaling scaling) {
  const double f = model.density(p);
  if (!(f > 0.0)) throw InvalidArgument("asymptotic variance needs a point with positive density");
  const int d = model.manifold().dim();
  return unit_ball_volume(d) * f * f * squared_integral(effective_kernel(kernel, scaling, d), d);
}

double total_mass(const DensityModel& model, std::size_t resolution, double axial_lo, double axial_hi) {
  const Manifold m = model.manifold();
  const auto f = [&](Coords p) { return model.density(p); };
  switch (m.kind()) {
    case ManifoldKind::sphere:
      return integrate(gauss_sphere_grid(2 * resolution, m.radius()), f);
    case ManifoldKind::cylinder: {
      const auto axial_cells = static_cast<std::size_t>(std::ceil((axial_hi - axial_lo) * 50.0));
      return integrate(cylinder_grid(resolution, axial_cells, axial_lo, axial_hi), f);
    }
    case ManifoldKind::euclidean:
      break;
  }
  throw InvalidArgument("total_mass supports sphere and cylinder models");
}

double ball_probability(const DensityModel& model, Coords center, double r) {
  return integrate_geodesic_ball(model.manifold(), center, r, [&](Coords p) { return model.density(p); });
}

}  // namespace geoknn
