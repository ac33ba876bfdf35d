#pragma once

#include <functional>
#include <string>

namespace geoknn {

/// A radial kernel profile K on [0, 1], zero beyond 1. Evaluation returns
/// scale() * profile(t), so a normalized kernel is just a rescaled copy.
class Kernel {
 public:
  using Profile = std::function<double(double)>;

  Kernel(std::string name, Profile profile, double lipschitz_bound, double scale = 1.0);

  /// K(t) for t >= 0; 0 for t > 1.
  double operator()(double t) const { return t > 1.0 ? 0.0 : scale_ * profile_(t); }

  const std::string& name() const noexcept { return name_; }
  double lipschitz_bound() const noexcept { return lipschitz_ * scale_; }
  double scale() const noexcept { return scale_; }

  /// Copy whose values are multiplied by factor.
  Kernel scaled(double factor) const;

 private:
  std::string name_;
  Profile profile_;
  double lipschitz_;
  double scale_;
};

/// Biweight profile (15/16)(1 - t^2)^2 on [0, 1].
Kernel quadratic_kernel();

/// Identically zero profile, used for degenerate checks.
Kernel zero_kernel();

/// Looks a kernel up by name ("quadratic"). Throws InvalidArgument.
Kernel kernel_by_name(const std::string& name);

/// paper_faithful uses K as given; normalized divides by radial_normalization.
enum class KernelScaling { paper_faithful, normalized };

KernelScaling parse_kernel_scaling(const std::string& text);
std::string to_string(KernelScaling scaling);

/// c_d = |S^{d-1}| * int_0^1 K(t) t^{d-1} dt, i.e. the integral of K(|u|) over R^d.
double radial_normalization(const Kernel& k, int d);

/// int over the unit ball of K^2(|u|) du.
double squared_integral(const Kernel& k, int d);

/// int over R^d of |u|^2 K(|u|) du.
double second_moment(const Kernel& k, int d);

/// The kernel that an estimator on a d-dimensional manifold actually uses.
Kernel effective_kernel(const Kernel& k, KernelScaling scaling, int d);

}  // namespace geoknn
