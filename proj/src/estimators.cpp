#include "geoknn/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "geoknn/errors.hpp"

namespace geoknn {

namespace {

// Neumaier summation over values sorted ascending.
double ordered_compensated_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

std::size_t count_coincident(std::span<const Neighbor> candidates) {
  return static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [](const Neighbor& n) { return n.distance == 0.0; }));
}

void check_fixed_bandwidth(const Manifold& m, double h) {
  if (!(h > 0.0) || !(h < m.injectivity_radius())) {
    throw InvalidArgument(fmt::format("fixed bandwidth h = {} must lie in (0, {})", h, m.injectivity_radius()));
  }
}

}  // namespace

EstimatorKind parse_estimator_kind(const std::string& text) {
  if (text == "knn" || text == "knn_kernel") return EstimatorKind::knn_kernel;
  if (text == "simple" || text == "simple_knn") return EstimatorKind::simple_knn;
  if (text == "fixed" || text == "fixed_bandwidth") return EstimatorKind::fixed_bandwidth;
  throw InvalidArgument("unknown estimator '" + text + "' (expected knn, simple or fixed)");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::knn_kernel:
      return "knn";
    case EstimatorKind::simple_knn:
      return "simple";
    case EstimatorKind::fixed_bandwidth:
      return "fixed";
  }
  return {};
}

DensityEstimate kernel_estimate(const SampleSet& sample, Coords p, std::span<const Neighbor> candidates,
                                double bandwidth, const Kernel& kernel) {
  return kernel_estimate(sample, p, candidates, bandwidth, kernel, sample.size());
}

DensityEstimate kernel_estimate(const SampleSet& sample, Coords p, std::span<const Neighbor> candidates,
                                double bandwidth, const Kernel& kernel, std::size_t sample_size) {
  if (sample_size == 0) throw InvalidArgument("kernel estimate over an empty sample");
  if (bandwidth == 0.0) throw DegenerateBandwidth(count_coincident(candidates));
  const Manifold& m = sample.manifold();
  std::vector<double> terms;
  terms.reserve(candidates.size());
  for (const Neighbor& nb : candidates) {
    // Closed ball: the point at distance exactly zeta enters with K(1).
    if (nb.distance > bandwidth) continue;
    const double weight = kernel(nb.distance / bandwidth);
    if (weight == 0.0) continue;
    // Base point x_j, argument p.
    const double theta = volume_density(m, sample.point(nb.index), p);
    terms.push_back(weight / theta);
  }
  DensityEstimate out;
  out.bandwidth_used = bandwidth;
  out.contributing_points = terms.size();
  const double total = ordered_compensated_sum(terms);
  out.value = total / (static_cast<double>(sample_size) * std::pow(bandwidth, m.dim()));
  return out;
}

DensityEstimator::DensityEstimator(const SampleSet& sample, EstimatorConfig config, bool build_index)
    : sample_(&sample),
      config_(std::move(config)),
      kernel_(geoknn::effective_kernel(config_.kernel, config_.scaling, sample.manifold().dim())) {
  const Manifold& m = sample.manifold();
  if (config_.kind == EstimatorKind::fixed_bandwidth) {
    check_fixed_bandwidth(m, config_.h);
  } else if (config_.k < 1) {
    throw InvalidArgument("k must be >= 1");
  }
  if (build_index) index_.emplace(sample);
}

DensityEstimate DensityEstimator::from_candidates(Coords p, std::span<const Neighbor> candidates,
                                                  double bandwidth) const {
  return kernel_estimate(*sample_, p, candidates, bandwidth, kernel_);
}

DensityEstimate DensityEstimator::operator()(Coords p) const {
  const SampleSet& sample = *sample_;
  const Manifold& m = sample.manifold();
  validate_point(m, p);

  if (config_.kind == EstimatorKind::fixed_bandwidth) {
    if (index_) {
      const auto near = index_->within(p, config_.h);
      return from_candidates(p, near, config_.h);
    }
    std::vector<Neighbor> all(sample.size());
    for (std::size_t j = 0; j < sample.size(); ++j) all[j] = {j, distance(m, p, sample.point(j))};
    return from_candidates(p, all, config_.h);
  }

  const Neighborhood nb = index_ ? index_->neighborhood(p, config_.k) : brute_force_neighborhood(sample, p, config_.k);
  const double zeta = clamped_bandwidth(nb.kth_distance, m);

  if (config_.kind == EstimatorKind::simple_knn) {
    if (zeta == 0.0) throw DegenerateBandwidth(count_coincident(nb.candidates));
    DensityEstimate out;
    out.bandwidth_used = zeta;
    out.contributing_points = static_cast<std::size_t>(std::count_if(
        nb.candidates.begin(), nb.candidates.end(), [zeta](const Neighbor& n) { return n.distance <= zeta; }));
    out.value = static_cast<double>(config_.k) /
                (static_cast<double>(sample.size()) * std::pow(zeta, m.dim()) * unit_ball_volume(m.dim()));
    return out;
  }
  return from_candidates(p, nb.candidates, zeta);
}

DensityEstimate knn_kernel_estimate(const SampleSet& sample, Coords p, std::size_t k, const Kernel& kernel,
                                    KernelScaling scaling) {
  EstimatorConfig cfg{EstimatorKind::knn_kernel, k, 0.0, kernel, scaling};
  return DensityEstimator(sample, std::move(cfg))(p);
}

DensityEstimate fixed_bandwidth_estimate(const SampleSet& sample, Coords p, double h, const Kernel& kernel,
                                         KernelScaling scaling) {
  EstimatorConfig cfg{EstimatorKind::fixed_bandwidth, 0, h, kernel, scaling};
  return DensityEstimator(sample, std::move(cfg))(p);
}

DensityEstimate simple_knn_estimate(const SampleSet& sample, Coords p, std::size_t k) {
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::simple_knn;
  cfg.k = k;
  return DensityEstimator(sample, std::move(cfg))(p);
}

std::vector<DensityEstimate> estimate_on_grid(const SampleSet& sample, std::span<const Point> grid,
                                              const EstimatorConfig& config) {
  std::vector<DensityEstimate> out;
  if (grid.empty()) return out;
  const DensityEstimator estimator(sample, config, true);
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.push_back(estimator(grid[i]));
    } catch (const DegenerateBandwidth& e) {
      throw GridEvaluationError(i, e.what(), e.duplicates());
    } catch (const std::exception& e) {
      throw GridEvaluationError(i, e.what(), std::nullopt);
    }
  }
  return out;
}

GridEvaluation evaluate_grid(const SampleSet& sample, std::span<const Point> grid, const EstimatorConfig& config) {
  GridEvaluation out;
  if (grid.empty()) return out;
  const DensityEstimator estimator(sample, config, true);
  out.estimates.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      out.estimates.push_back(estimator(grid[i]));
    } catch (const DegenerateBandwidth&) {
      out.estimates.push_back({std::numeric_limits<double>::quiet_NaN(), 0.0, 0});
      out.degenerate.push_back(i);
    } catch (const std::exception& e) {
      throw GridEvaluationError(i, e.what(), std::nullopt);
    }
  }
  return out;
}

}  // namespace geoknn
