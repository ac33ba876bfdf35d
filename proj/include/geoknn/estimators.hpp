#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "geoknn/kernel.hpp"
#include "geoknn/manifold.hpp"
#include "geoknn/neighbors.hpp"
#include "geoknn/sample_set.hpp"

namespace geoknn {

enum class EstimatorKind {
  knn_kernel,       // kernel estimator with bandwidth min(H_n(p), inj)
  simple_knn,       // k / (n zeta^d lambda(V_1))
  fixed_bandwidth,  // kernel estimator with a constant bandwidth h
};

EstimatorKind parse_estimator_kind(const std::string& text);
std::string to_string(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::knn_kernel;
  std::size_t k = 0;  // kNN variants
  double h = 0.0;     // fixed_bandwidth
  Kernel kernel = quadratic_kernel();
  KernelScaling scaling = KernelScaling::normalized;
};

/// Density with respect to the Riemannian volume measure.
struct DensityEstimate {
  double value = 0.0;
  double bandwidth_used = 0.0;
  std::size_t contributing_points = 0;
};

/// Thrown by estimate_on_grid(); carries the failing grid index.
class GridEvaluationError : public std::runtime_error {
 public:
  GridEvaluationError(std::size_t grid_index, const std::string& reason, std::optional<std::size_t> duplicates)
      : std::runtime_error("grid point " + std::to_string(grid_index) + ": " + reason),
        grid_index_(grid_index),
        duplicates_(duplicates) {}

  std::size_t grid_index() const noexcept { return grid_index_; }
  /// Set when the failure was a degenerate (zero) bandwidth.
  std::optional<std::size_t> duplicates() const noexcept { return duplicates_; }

 private:
  std::size_t grid_index_;
  std::optional<std::size_t> duplicates_;
};

/// Evaluates one estimator over one sample. Holds the effective kernel (so
/// the normalization constant is computed once) and, optionally, a
/// NeighborIndex. Results do not depend on whether the index is used.
class DensityEstimator {
 public:
  DensityEstimator(const SampleSet& sample, EstimatorConfig config, bool build_index = false);

  DensityEstimate operator()(Coords p) const;

  /// Kernel sum for a given bandwidth over a candidate list that contains
  /// every sample point within that bandwidth. See kernel_estimate().
  DensityEstimate from_candidates(Coords p, std::span<const Neighbor> candidates, double bandwidth) const;

  const EstimatorConfig& config() const noexcept { return config_; }
  const Kernel& effective_kernel() const noexcept { return kernel_; }
  const SampleSet& sample() const noexcept { return *sample_; }

 private:
  const SampleSet* sample_;
  EstimatorConfig config_;
  Kernel kernel_;
  std::optional<NeighborIndex> index_;
};

/// (1 / (n zeta^d)) sum_j K(d(p, x_j) / zeta) / theta_{x_j}(p), summed over
/// the candidates with d <= zeta. `kernel` is used as given (already scaled).
/// Contributions are sorted and added with compensated summation, so the
/// result does not depend on the order of the sample. Throws
/// DegenerateBandwidth when zeta == 0.
DensityEstimate kernel_estimate(const SampleSet& sample, Coords p, std::span<const Neighbor> candidates,
                                double bandwidth, const Kernel& kernel);

/// Same, normalizing by `sample_size` instead of sample.size() (leave-one-out
/// evaluation passes n - 1 with the held-out point absent from candidates).
DensityEstimate kernel_estimate(const SampleSet& sample, Coords p, std::span<const Neighbor> candidates,
                                double bandwidth, const Kernel& kernel, std::size_t sample_size);

DensityEstimate knn_kernel_estimate(const SampleSet& sample, Coords p, std::size_t k, const Kernel& kernel,
                                    KernelScaling scaling = KernelScaling::normalized);

/// Kernel estimator with a constant bandwidth; requires 0 < h < injectivity radius.
DensityEstimate fixed_bandwidth_estimate(const SampleSet& sample, Coords p, double h, const Kernel& kernel,
                                         KernelScaling scaling = KernelScaling::normalized);

DensityEstimate simple_knn_estimate(const SampleSet& sample, Coords p, std::size_t k);

/// Elementwise equal to the pointwise estimators; shares one NeighborIndex.
/// Throws GridEvaluationError on the first failing point.
std::vector<DensityEstimate> estimate_on_grid(const SampleSet& sample, std::span<const Point> grid,
                                              const EstimatorConfig& config);

/// Like estimate_on_grid(), but degenerate-bandwidth points get a NaN value
/// and are listed instead of aborting the evaluation.
struct GridEvaluation {
  std::vector<DensityEstimate> estimates;
  std::vector<std::size_t> degenerate;
};
GridEvaluation evaluate_grid(const SampleSet& sample, std::span<const Point> grid, const EstimatorConfig& config);

}  // namespace geoknn
