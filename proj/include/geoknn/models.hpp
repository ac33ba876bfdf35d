#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "geoknn/kernel.hpp"
#include "geoknn/manifold.hpp"
#include "geoknn/random.hpp"
#include "geoknn/sample_set.hpp"

namespace geoknn {

/// A sampler paired with its exact density (with respect to the Riemannian
/// volume measure), used as simulation ground truth.
class DensityModel {
 public:
  virtual ~DensityModel() = default;

  virtual std::string name() const = 0;
  virtual Manifold manifold() const = 0;
  virtual SampleSet sample(Rng& rng, std::size_t n) const = 0;
  virtual double density(Coords p) const = 0;
  /// Named scalar parameters, for reports.
  virtual std::vector<std::pair<std::string, double>> parameters() const = 0;
};

using ModelPtr = std::shared_ptr<const DensityModel>;

/// von Mises-Fisher on the unit sphere, f(x) = kappa / (4 pi sinh kappa) exp(kappa <x, mu>).
ModelPtr von_mises_fisher(const Point& mu, double kappa);

/// Uniform on the unit sphere, sampled by normalizing standard Gaussian 3-vectors.
ModelPtr uniform_sphere();

/// Cylinder model: angle ~ vM(mean_angle, kappa),
/// axial | angle ~ N(intercept + slope cos(angle), sd^2).
/// Density is taken w.r.t. d(angle) d(axial), the volume measure of the unit cylinder.
struct MardiaSuttonParams {
  double mean_angle;  // radians
  double kappa;
  double intercept;
  double slope;
  double sd;

  /// Mean direction (-1, 0), kappa 5, axial mean 1 + 2 sqrt(5) cos(angle), unit variance.
  static MardiaSuttonParams standard();
};
ModelPtr mardia_sutton(const MardiaSuttonParams& params = MardiaSuttonParams::standard());

/// "vmf" (mu = north pole, kappa = 3 unless given), "uniform", "mardia-sutton".
ModelPtr model_by_name(const std::string& name, double kappa = 0.0);

/// Modified Bessel function I_0 by its power series.
double bessel_i0(double x);

/// sigma^2(p) = lambda(V_1) f(p)^2 int_{V_1} K^2, the asymptotic variance of
/// sqrt(k) (f_n(p) - f(p)). Throws InvalidArgument when f(p) = 0.
double asymptotic_sigma_sq(const DensityModel& model, Coords p, const Kernel& kernel, KernelScaling scaling);

/// Total mass of the model density by quadrature: Gauss-Legendre in z times
/// 2 * resolution longitudes on the sphere, midpoint rule over
/// [axial_lo, axial_hi] with `resolution` angles on the cylinder.
double total_mass(const DensityModel& model, std::size_t resolution = 400, double axial_lo = -20.0,
                  double axial_hi = 27.0);

/// P(x in B_r(center)) by quadrature of the density over the geodesic ball.
double ball_probability(const DensityModel& model, Coords center, double r);

}  // namespace geoknn
