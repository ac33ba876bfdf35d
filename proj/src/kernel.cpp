#include "geoknn/kernel.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "geoknn/errors.hpp"
#include "geoknn/manifold.hpp"

namespace geoknn {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

// Adaptive 21-point Gauss-Kronrod on [0, 1]. The kernel has compact support,
// so the integrand is smooth on the whole interval for the supplied profiles.
template <class F>
double integrate_unit_interval(F&& f) {
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, 0.0, 1.0, 15, kQuadratureTolerance, &error);
  return value;
}

void check_dim(int d) {
  if (d < 1) throw InvalidArgument("kernel dimension must be >= 1");
}

}  // namespace

Kernel::Kernel(std::string name, Profile profile, double lipschitz_bound, double scale)
    : name_(std::move(name)), profile_(std::move(profile)), lipschitz_(lipschitz_bound), scale_(scale) {
  if (!profile_) throw InvalidArgument("kernel profile must be callable");
  if (!(lipschitz_bound >= 0.0)) throw InvalidArgument("Lipschitz bound must be nonnegative");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("kernel scale must be positive");
}

Kernel Kernel::scaled(double factor) const {
  return Kernel(name_, profile_, lipschitz_, scale_ * factor);
}

Kernel quadratic_kernel() {
  // |K'(t)| = (15/4) t (1 - t^2) peaks at t = 1/sqrt(3).
  const double lipschitz = 15.0 / 4.0 * (1.0 / std::sqrt(3.0)) * (2.0 / 3.0);
  return Kernel(
      "quadratic",
      [](double t) {
        const double s = 1.0 - t * t;
        return 15.0 / 16.0 * s * s;
      },
      lipschitz);
}

Kernel zero_kernel() {
  return Kernel("zero", [](double) { return 0.0; }, 0.0);
}

Kernel kernel_by_name(const std::string& name) {
  if (name == "quadratic") return quadratic_kernel();
  throw InvalidArgument("unknown kernel '" + name + "' (supported: quadratic)");
}

KernelScaling parse_kernel_scaling(const std::string& text) {
  if (text == "paper" || text == "paper_faithful") return KernelScaling::paper_faithful;
  if (text == "normalized") return KernelScaling::normalized;
  throw InvalidArgument("unknown kernel scaling '" + text + "' (expected paper or normalized)");
}

std::string to_string(KernelScaling scaling) {
  return scaling == KernelScaling::paper_faithful ? "paper" : "normalized";
}

double radial_normalization(const Kernel& k, int d) {
  check_dim(d);
  const double radial = integrate_unit_interval([&](double t) { return k(t) * std::pow(t, d - 1); });
  return unit_sphere_surface(d) * radial;
}

double squared_integral(const Kernel& k, int d) {
  check_dim(d);
  const double radial = integrate_unit_interval([&](double t) {
    const double v = k(t);
    return v * v * std::pow(t, d - 1);
  });
  return unit_sphere_surface(d) * radial;
}

double second_moment(const Kernel& k, int d) {
  check_dim(d);
  const double radial = integrate_unit_interval([&](double t) { return k(t) * std::pow(t, d + 1); });
  return unit_sphere_surface(d) * radial;
}

Kernel effective_kernel(const Kernel& k, KernelScaling scaling, int d) {
  if (scaling == KernelScaling::paper_faithful) return k;
  const double c = radial_normalization(k, d);
  if (!(c > 0.0)) throw InvalidArgument("cannot normalize a kernel with zero integral");
  return k.scaled(1.0 / c);
}

}  // namespace geoknn
