#include "geoknn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "geoknn/errors.hpp"
#include "geoknn/random.hpp"
#include "geoknn/quadrature.hpp"

namespace geoknn {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument(fmt::format("length mismatch: {} vs {}", a.size(), b.size()));
  if (a.empty()) throw InvalidArgument("error criteria need at least one pair");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

json config_json(const ExperimentConfig& c) {
  return json{{"model", c.model},
              {"kappa", c.kappa},
              {"n", c.n},
              {"replications", c.replications},
              {"k_grid", c.k_grid},
              {"kernel", c.kernel.name()},
              {"scaling", to_string(c.scaling)},
              {"mode", to_string(c.mode)},
              {"root_seed", c.root_seed}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// All neighbors of sample point i sorted by distance (ties by index), and the
// effective sample size for the evaluation mode.
std::vector<Neighbor> sorted_neighbors(const SampleSet& sample, std::size_t i, EvaluationMode mode) {
  const Manifold& m = sample.manifold();
  const Coords p = sample.point(i);
  std::vector<Neighbor> nb;
  nb.reserve(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    if (mode == EvaluationMode::leave_one_out && j == i) continue;
    nb.push_back({j, distance(m, p, sample.point(j))});
  }
  std::sort(nb.begin(), nb.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  return nb;
}

// Evaluates the kNN kernel estimator at every sample point for each k in
// k_grid; estimates[g][i]. Shares one distance sort per sample point.
std::vector<std::vector<double>> sample_point_estimates(const SampleSet& sample, std::span<const std::size_t> k_grid,
                                                        const Kernel& kernel, EvaluationMode mode) {
  const Manifold& m = sample.manifold();
  const std::size_t n = sample.size();
  const std::size_t n_eff = mode == EvaluationMode::leave_one_out ? n - 1 : n;
  std::vector<std::vector<double>> out(k_grid.size(), std::vector<double>(n, kNaN));
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = sorted_neighbors(sample, i, mode);
    for (std::size_t g = 0; g < k_grid.size(); ++g) {
      const std::size_t k = k_grid[g];
      if (k < 1 || k > nb.size()) throw InvalidArgument(fmt::format("k = {} outside [1, {}]", k, nb.size()));
      const double zeta = clamped_bandwidth(nb[k - 1].distance, m);
      const auto end = std::upper_bound(nb.begin(), nb.end(), zeta,
                                        [](double z, const Neighbor& x) { return z < x.distance; });
      const std::span<const Neighbor> inside(nb.data(), static_cast<std::size_t>(end - nb.begin()));
      try {
        out[g][i] = kernel_estimate(sample, sample.point(i), inside, zeta, kernel, n_eff).value;
      } catch (const DegenerateBandwidth&) {
        out[g][i] = kNaN;
      }
    }
  }
  return out;
}

std::vector<ReplicationRecord> run_replication(const ExperimentConfig& config, const DensityModel& model,
                                               const Kernel& kernel, std::size_t replication) {
  Rng rng = substream(config.root_seed, replication);
  const SampleSet sample = model.sample(rng, config.n);
  std::vector<double> truths(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) truths[i] = model.density(sample.point(i));

  const auto estimates = sample_point_estimates(sample, config.k_grid, kernel, config.mode);
  std::vector<ReplicationRecord> records;
  records.reserve(config.k_grid.size());
  for (std::size_t g = 0; g < config.k_grid.size(); ++g) {
    ReplicationRecord rec;
    rec.k = config.k_grid[g];
    rec.replication = replication;
    rec.degenerate_points = static_cast<std::size_t>(
        std::count_if(estimates[g].begin(), estimates[g].end(), [](double v) { return std::isnan(v); }));
    if (rec.excluded()) {
      rec.mse = kNaN;
      rec.medse = kNaN;
    } else {
      rec.mse = mse(estimates[g], truths);
      rec.medse = medse(estimates[g], truths);
    }
    records.push_back(rec);
  }
  return records;
}

template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double mse(std::span<const double> estimates, std::span<const double> truths) {
  check_lengths(estimates, truths);
  double s = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = estimates[i] - truths[i];
    s += e * e;
  }
  return s / static_cast<double>(estimates.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double medse(std::span<const double> estimates, std::span<const double> truths) {
  check_lengths(estimates, truths);
  std::vector<double> sq(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double e = estimates[i] - truths[i];
    sq[i] = e * e;
  }
  return median(std::move(sq));
}

EvaluationMode parse_evaluation_mode(const std::string& text) {
  if (text == "plugin" || text == "plug_in") return EvaluationMode::plug_in;
  if (text == "loo" || text == "leave_one_out") return EvaluationMode::leave_one_out;
  throw InvalidArgument("unknown evaluation mode '" + text + "' (expected plugin or loo)");
}

std::string to_string(EvaluationMode mode) { return mode == EvaluationMode::plug_in ? "plugin" : "loo"; }

ExperimentConfig ExperimentConfig::simulation_study(const std::string& model) {
  ExperimentConfig c;
  c.model = model;
  c.n = 200;
  c.replications = 1000;
  c.k_grid = equidistant_k_grid(5, 150, 20);
  c.kernel = quadratic_kernel();
  c.scaling = KernelScaling::paper_faithful;
  c.mode = EvaluationMode::plug_in;
  return c;
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  if (k_grid.empty()) throw InvalidArgument("k grid must not be empty");
  // Leave-one-out leaves n - 1 neighbors, so k < n covers both modes.
  for (std::size_t k : k_grid) {
    if (k < 1) throw InvalidArgument("k values must be >= 1");
    if (k >= n) {
      throw InvalidArgument(fmt::format("k = {} must be smaller than n = {}", k, n));
    }
  }
  model_by_name(model, kappa);
}

std::vector<std::size_t> equidistant_k_grid(std::size_t lo, std::size_t hi, std::size_t count) {
  if (count == 0) throw InvalidArgument("k grid length must be positive");
  if (lo < 1 || hi < lo) throw InvalidArgument("k grid needs 1 <= lo <= hi");
  if (count == 1) return {lo};
  std::vector<std::size_t> grid;
  grid.reserve(count);
  const double step = static_cast<double>(hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(lo) + step * static_cast<double>(i))));
  }
  return grid;
}

const KAggregate& SweepResult::at_k(std::size_t k) const {
  for (const auto& a : per_k) {
    if (a.k == k) return a;
  }
  throw InvalidArgument(fmt::format("k = {} is not in the sweep grid", k));
}

std::vector<double> estimates_at_sample_points(const SampleSet& sample, std::size_t k, const Kernel& effective_kernel,
                                               EvaluationMode mode) {
  const std::size_t grid[] = {k};
  return std::move(sample_point_estimates(sample, grid, effective_kernel, mode).front());
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const ModelPtr model = model_by_name(config.model, config.kappa);
  const Kernel kernel = effective_kernel(config.kernel, config.scaling, model->manifold().dim());

  std::vector<std::vector<ReplicationRecord>> by_rep(config.replications);
  parallel_for(config.replications, config.threads,
               [&](std::size_t r) { by_rep[r] = run_replication(config, *model, kernel, r); });

  SweepResult result;
  result.config = config;
  result.config_hash = fnv1a_hex(config_json(config).dump());
  const std::size_t grid_size = config.k_grid.size();
  result.records.reserve(grid_size * config.replications);
  for (std::size_t g = 0; g < grid_size; ++g) {
    std::vector<double> mses;
    std::vector<double> medses;
    KAggregate agg;
    agg.k = config.k_grid[g];
    for (std::size_t r = 0; r < config.replications; ++r) {
      const ReplicationRecord& rec = by_rep[r][g];
      result.records.push_back(rec);
      if (rec.excluded()) {
        ++agg.excluded;
        continue;
      }
      mses.push_back(rec.mse);
      medses.push_back(rec.medse);
    }
    agg.used = mses.size();
    if (!mses.empty()) {
      agg.mean_mse = mean_of(mses);
      agg.median_mse = median(mses);
      agg.sd_mse = sd_of(mses);
      agg.mean_medse = mean_of(medses);
      agg.median_medse = median(medses);
      agg.sd_medse = sd_of(medses);
    } else {
      agg.mean_mse = agg.median_mse = agg.sd_mse = kNaN;
      agg.mean_medse = agg.median_medse = agg.sd_medse = kNaN;
    }
    result.per_k.push_back(agg);
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "k,replication,mse,medse\n";
  for (const auto& rec : result.records) {
    if (rec.excluded()) {
      out += fmt::format("{},{},nan,nan\n", rec.k, rec.replication);
    } else {
      out += fmt::format("{},{},{:.17g},{:.17g}\n", rec.k, rec.replication, rec.mse, rec.medse);
    }
  }
  return out;
}

std::string sweep_summary_json(const SweepResult& result) {
  json per_k = json::array();
  for (const auto& a : result.per_k) {
    per_k.push_back(json{{"k", a.k},
                         {"mean_mse", number_or_null(a.mean_mse)},
                         {"median_mse", number_or_null(a.median_mse)},
                         {"sd_mse", number_or_null(a.sd_mse)},
                         {"mean_medse", number_or_null(a.mean_medse)},
                         {"median_medse", number_or_null(a.median_medse)},
                         {"sd_medse", number_or_null(a.sd_medse)},
                         {"used", a.used},
                         {"excluded", a.excluded}});
  }
  const json doc{{"config", config_json(result.config)},
                 {"config_hash", result.config_hash},
                 {"seed", result.config.root_seed},
                 {"per_k", per_k}};
  return doc.dump(2) + "\n";
}

double sup_error(std::span<const Point> grid, const std::function<double(Coords)>& estimate,
                 const DensityModel& model) {
  if (grid.empty()) throw InvalidArgument("sup error over an empty grid");
  double worst = 0.0;
  for (const auto& p : grid) worst = std::max(worst, std::abs(estimate(p) - model.density(p)));
  return worst;
}

std::function<std::size_t(std::size_t)> power_k_rule(double exponent) {
  if (!(exponent > 0.0 && exponent < 1.0)) throw InvalidArgument("k exponent must lie in (0, 1)");
  return [exponent](std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), exponent)));
  };
}

std::vector<Point> cap_grid(const Point& axis, double min_cosine, std::size_t lattice_size) {
  return fibonacci_cap(lattice_size, axis, min_cosine);
}

ConsistencyReport consistency_check(const ConsistencyConfig& config) {
  if (!config.model) throw InvalidArgument("consistency check needs a model");
  if (config.n_ladder.empty()) throw InvalidArgument("consistency check needs a nonempty n ladder");
  if (config.grid.empty()) throw InvalidArgument("consistency check needs a nonempty grid");
  if (config.replications < 1) throw InvalidArgument("replications must be >= 1");
  if (!config.k_rule) throw InvalidArgument("consistency check needs a k rule");

  ConsistencyReport report;
  EstimatorConfig est;
  est.kind = EstimatorKind::knn_kernel;
  est.kernel = config.kernel;
  est.scaling = config.scaling;

  double prev_log_ratio = -1.0;
  double prev_ratio = 2.0;
  for (std::size_t level = 0; level < config.n_ladder.size(); ++level) {
    const std::size_t n = config.n_ladder[level];
    const std::size_t k = config.k_rule(n);
    if (k < 1 || k > n) throw InvalidArgument(fmt::format("k rule gives k = {} outside [1, n = {}]", k, n));
    const double log_ratio = static_cast<double>(k) / std::log(static_cast<double>(n));
    const double ratio = static_cast<double>(k) / static_cast<double>(n);
    if (level > 0 && !(log_ratio > prev_log_ratio && ratio < prev_ratio)) report.growth_conditions_hold = false;
    prev_log_ratio = log_ratio;
    prev_ratio = ratio;

    ConsistencyLevel out;
    out.n = n;
    out.k = k;
    est.k = k;
    const std::uint64_t level_seed = mix64(config.root_seed ^ mix64(level));
    for (std::size_t r = 0; r < config.replications; ++r) {
      Rng rng = substream(level_seed, r);
      const SampleSet sample = config.model->sample(rng, n);
      const DensityEstimator estimator(sample, est, true);
      try {
        out.sup_errors.push_back(
            sup_error(config.grid, [&](Coords p) { return estimator(p).value; }, *config.model));
      } catch (const DegenerateBandwidth&) {
        ++out.excluded;
      }
    }
    out.mean_sup_error = out.sup_errors.empty() ? kNaN : mean_of(out.sup_errors);
    out.sd_sup_error = sd_of(out.sup_errors);
    report.levels.push_back(std::move(out));
  }
  return report;
}

std::string consistency_json(const ConsistencyReport& report, const ConsistencyConfig& config) {
  json levels = json::array();
  for (const auto& l : report.levels) {
    levels.push_back(json{{"n", l.n},
                          {"k", l.k},
                          {"mean_sup_error", number_or_null(l.mean_sup_error)},
                          {"sd_sup_error", number_or_null(l.sd_sup_error)},
                          {"sup_errors", l.sup_errors},
                          {"excluded", l.excluded}});
  }
  const json doc{{"model", config.model ? config.model->name() : ""},
                 {"grid_points", config.grid.size()},
                 {"replications", config.replications},
                 {"kernel", config.kernel.name()},
                 {"scaling", to_string(config.scaling)},
                 {"seed", config.root_seed},
                 {"growth_conditions_hold", report.growth_conditions_hold},
                 {"levels", levels}};
  return doc.dump(2) + "\n";
}

double max_normality_exponent(int d) { return 4.0 / (d + 4.0); }

std::size_t normality_k(std::size_t n, double gamma, int d) {
  const double limit = max_normality_exponent(d);
  if (!(gamma > 0.0 && gamma < limit)) {
    throw InvalidArgument(fmt::format(
        "gamma = {} must lie in (0, 4/(d+4) = {:.6g}): the sequence k_n = n^gamma needs "
        "sqrt(k_n n^(-4/(d+4))) -> 0 for the asymptotic bias to vanish",
        gamma, limit));
  }
  const auto k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), gamma)));
  if (k >= n) throw InvalidArgument(fmt::format("k = {} must be smaller than n = {}", k, n));
  return k;
}

double ks_distance_to_standard_normal(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("KS distance of an empty sample");
  std::sort(values.begin(), values.end());
  const double m = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = standard_normal_cdf(values[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m));
  }
  return d;
}

NormalitySummary normality_diagnostic(const NormalityConfig& config) {
  if (!config.model) throw InvalidArgument("normality diagnostic needs a model");
  if (config.replications < 1) throw InvalidArgument("replications must be >= 1");
  if (config.k < 1 || config.k > config.n) throw InvalidArgument("normality diagnostic needs 1 <= k <= n");
  validate_point(config.model->manifold(), config.point);

  NormalitySummary out;
  out.truth = config.model->density(config.point);
  if (!(out.truth > 0.0)) throw InvalidArgument("normality diagnostic needs a point with positive density");
  out.sigma = config.sigma_override ? *config.sigma_override
                                    : std::sqrt(asymptotic_sigma_sq(*config.model, config.point, config.kernel,
                                                                    config.scaling));
  if (!(out.sigma > 0.0)) throw InvalidArgument("sigma must be positive");

  EstimatorConfig est;
  est.kind = EstimatorKind::knn_kernel;
  est.k = config.k;
  est.kernel = config.kernel;
  est.scaling = config.scaling;
  const double root_k = std::sqrt(static_cast<double>(config.k));

  std::vector<double> values(config.replications, kNaN);
  for (std::size_t r = 0; r < config.replications; ++r) {
    Rng rng = substream(config.root_seed, r);
    const SampleSet sample = config.model->sample(rng, config.n);
    try {
      const double f_hat = DensityEstimator(sample, est)(config.point).value;
      values[r] = root_k * (f_hat - out.truth) / out.sigma;
    } catch (const DegenerateBandwidth&) {
      ++out.excluded;
    }
  }
  for (double v : values) {
    if (!std::isnan(v)) out.standardized.push_back(v);
  }
  if (out.standardized.empty()) throw DataError("every replication had a degenerate bandwidth");

  const auto& z = out.standardized;
  out.mean = mean_of(z);
  out.sd = sd_of(z);
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : z) {
    const double c = x - out.mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  const double cnt = static_cast<double>(z.size());
  m2 /= cnt;
  m3 /= cnt;
  m4 /= cnt;
  out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : kNaN;
  out.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : kNaN;
  out.ks_statistic = ks_distance_to_standard_normal(z);
  return out;
}

std::string normality_json(const NormalitySummary& s, const NormalityConfig& config) {
  const json doc{{"model", config.model ? config.model->name() : ""},
                 {"point", config.point.coords},
                 {"n", config.n},
                 {"k", config.k},
                 {"replications", config.replications},
                 {"kernel", config.kernel.name()},
                 {"scaling", to_string(config.scaling)},
                 {"seed", config.root_seed},
                 {"truth", s.truth},
                 {"sigma", s.sigma},
                 {"mean", number_or_null(s.mean)},
                 {"sd", number_or_null(s.sd)},
                 {"skewness", number_or_null(s.skewness)},
                 {"excess_kurtosis", number_or_null(s.excess_kurtosis)},
                 {"ks_statistic", s.ks_statistic},
                 {"excluded", s.excluded},
                 {"standardized", s.standardized}};
  return doc.dump(2) + "\n";
}

}  // namespace geoknn
