#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoknn/estimators.hpp"
#include "geoknn/kernel.hpp"
#include "geoknn/models.hpp"

namespace geoknn {

// ---------------------------------------------------------------------------
// Error criteria at the sample points.

/// (1/n) sum (estimate_i - truth_i)^2.
double mse(std::span<const double> estimates, std::span<const double> truths);

/// median of (estimate_i - truth_i)^2; even lengths average the two central values.
double medse(std::span<const double> estimates, std::span<const double> truths);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// MSE / MedSE sweep over a grid of k.

enum class EvaluationMode {
  plug_in,        // estimator built from the full sample, evaluated at x_i
  leave_one_out,  // x_i removed from the sample when estimating at x_i
};

EvaluationMode parse_evaluation_mode(const std::string& text);
std::string to_string(EvaluationMode mode);

struct ExperimentConfig {
  std::string model = "uniform";
  double kappa = 0.0;  // 0 keeps the model default
  std::size_t n = 200;
  std::size_t replications = 1000;
  std::vector<std::size_t> k_grid;
  Kernel kernel = quadratic_kernel();
  KernelScaling scaling = KernelScaling::normalized;
  EvaluationMode mode = EvaluationMode::plug_in;
  std::uint64_t root_seed = 0;
  unsigned threads = 1;

  /// n = 200, 1000 replications, quadratic kernel with paper_faithful
  /// scaling, 20 equidistant k between 5 and 150, plug-in evaluation.
  static ExperimentConfig simulation_study(const std::string& model);

  /// Throws InvalidArgument unless replications >= 1, k_grid nonempty and
  /// max(k_grid) < n (n - 1 for leave-one-out).
  void validate() const;
};

/// `count` integers equally spaced from lo to hi, rounded to nearest.
std::vector<std::size_t> equidistant_k_grid(std::size_t lo, std::size_t hi, std::size_t count);

struct ReplicationRecord {
  std::size_t k = 0;
  std::size_t replication = 0;
  double mse = 0.0;
  double medse = 0.0;
  /// Sample points with a degenerate bandwidth; the record is excluded from
  /// aggregates when nonzero.
  std::size_t degenerate_points = 0;
  bool excluded() const noexcept { return degenerate_points != 0; }
};

struct KAggregate {
  std::size_t k = 0;
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double sd_mse = 0.0;
  double mean_medse = 0.0;
  double median_medse = 0.0;
  double sd_medse = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;  // k-grid order, then replication
  std::vector<KAggregate> per_k;
  std::string config_hash;

  const KAggregate& at_k(std::size_t k) const;
};

/// Deterministic given the config: replication r draws its sample from
/// substream(root_seed, r), and results are reduced by replication index.
SweepResult run_sweep(const ExperimentConfig& config);

/// Estimates at every sample point for one k, exactly as DensityEstimator
/// would produce them. NaN marks degenerate points.
std::vector<double> estimates_at_sample_points(const SampleSet& sample, std::size_t k, const Kernel& effective_kernel,
                                               EvaluationMode mode);

/// CSV with columns k,replication,mse,medse (excluded records print nan).
std::string sweep_csv(const SweepResult& result);
/// JSON summary: config echo, per-k aggregates, seed, config hash.
std::string sweep_summary_json(const SweepResult& result);

// ---------------------------------------------------------------------------
// Uniform consistency on a compact region.

/// sup over the grid of |estimate(p) - f(p)|.
double sup_error(std::span<const Point> grid, const std::function<double(Coords)>& estimate,
                 const DensityModel& model);

struct ConsistencyConfig {
  ModelPtr model;
  std::vector<std::size_t> n_ladder;
  std::function<std::size_t(std::size_t)> k_rule;
  std::vector<Point> grid;  // covers the compact region M_0
  std::size_t replications = 20;
  Kernel kernel = quadratic_kernel();
  KernelScaling scaling = KernelScaling::normalized;
  std::uint64_t root_seed = 0;
};

struct ConsistencyLevel {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean_sup_error = 0.0;
  double sd_sup_error = 0.0;
  std::vector<double> sup_errors;  // per replication
  std::size_t excluded = 0;
};

struct ConsistencyReport {
  std::vector<ConsistencyLevel> levels;
  /// k/log n increasing and k/n decreasing along the ladder (growth pattern
  /// required for uniform consistency).
  bool growth_conditions_hold = true;
};

/// k(n) = ceil(n^exponent).
std::function<std::size_t(std::size_t)> power_k_rule(double exponent);

/// Grid over the spherical cap <x, axis> >= min_cosine from a Fibonacci
/// lattice with `lattice_size` points on the full sphere.
std::vector<Point> cap_grid(const Point& axis, double min_cosine, std::size_t lattice_size);

ConsistencyReport consistency_check(const ConsistencyConfig& config);

std::string consistency_json(const ConsistencyReport& report, const ConsistencyConfig& config);

// ---------------------------------------------------------------------------
// Asymptotic normality at a point.

struct NormalityConfig {
  ModelPtr model;
  Point point;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t replications = 0;
  Kernel kernel = quadratic_kernel();
  KernelScaling scaling = KernelScaling::normalized;
  std::uint64_t root_seed = 0;
  /// Replaces sigma(p) when set.
  std::optional<double> sigma_override;
};

struct NormalitySummary {
  std::vector<double> standardized;  // sqrt(k) (f_n(p) - f(p)) / sigma(p)
  double truth = 0.0;
  double sigma = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_statistic = 0.0;
  std::size_t excluded = 0;
};

/// Largest exponent gamma for which k = n^gamma stays in the zero-bias
/// regime: gamma < 4 / (d + 4).
double max_normality_exponent(int d);

/// ceil(n^gamma); throws InvalidArgument if gamma is outside (0, 4/(d+4)).
std::size_t normality_k(std::size_t n, double gamma, int d);

NormalitySummary normality_diagnostic(const NormalityConfig& config);

/// Kolmogorov-Smirnov distance between the empirical law of `values` and N(0, 1).
double ks_distance_to_standard_normal(std::vector<double> values);

std::string normality_json(const NormalitySummary& summary, const NormalityConfig& config);

}  // namespace geoknn
