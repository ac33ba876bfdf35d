#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "geoknn/manifold.hpp"
#include "geoknn/sample_set.hpp"

namespace testing {

inline geoknn::Point random_point(std::mt19937_64& rng, const geoknn::Manifold& m, double spread = 3.0) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-spread, spread);
  switch (m.kind()) {
    case geoknn::ManifoldKind::sphere: {
      double x = g(rng), y = g(rng), z = g(rng);
      const double s = m.radius() / std::sqrt(x * x + y * y + z * z);
      return geoknn::Point{x * s, y * s, z * s};
    }
    case geoknn::ManifoldKind::cylinder:
      return geoknn::cylinder_point(std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng), u(rng));
    case geoknn::ManifoldKind::euclidean:
      break;
  }
  std::vector<double> c(m.dim());
  for (auto& v : c) v = u(rng);
  return geoknn::Point(c);
}

inline std::vector<geoknn::Point> random_points(std::mt19937_64& rng, const geoknn::Manifold& m, std::size_t n,
                                                double spread = 3.0) {
  std::vector<geoknn::Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(rng, m, spread));
  return out;
}

inline geoknn::SampleSet random_sample(std::mt19937_64& rng, const geoknn::Manifold& m, std::size_t n,
                                       double spread = 3.0) {
  return geoknn::SampleSet(m, random_points(rng, m, n, spread));
}

inline const std::vector<geoknn::Manifold>& test_manifolds() {
  static const std::vector<geoknn::Manifold> ms{geoknn::Manifold::euclidean(1), geoknn::Manifold::euclidean(2),
                                                geoknn::Manifold::euclidean(3), geoknn::Manifold::sphere(1.0),
                                                geoknn::Manifold::sphere(2.0),  geoknn::Manifold::cylinder()};
  return ms;
}

}  // namespace testing
