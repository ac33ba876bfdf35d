#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "geoknn/geoknn.hpp"

namespace geoknn::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw InvalidArgument(fmt::format("cannot parse {} from '{}'", what, s));
  return v;
}

std::size_t to_size(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw InvalidArgument(fmt::format("cannot parse {} from '{}'", what, s));
  return v;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) out.push_back(to_size(part, what));
  return out;
}

Point parse_point(const std::string& text) {
  std::vector<double> c;
  for (const auto& part : split(text, ',')) c.push_back(to_double(part, "point coordinate"));
  return Point(std::move(c));
}

// "NxM" -> {N, M}
std::pair<std::size_t, std::size_t> parse_dims(const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw InvalidArgument(fmt::format("expected NxM, got '{}'", text));
  return {to_size(parts[0], "grid rows"), to_size(parts[1], "grid columns")};
}

void report_rejected(std::ostream& err, const std::vector<RejectedRow>& rejected, std::size_t total) {
  if (rejected.empty()) return;
  fmt::print(err, "rejected {} of {} rows:\n", rejected.size(), total);
  for (const auto& r : rejected) fmt::print(err, "  line {}: {}\n", r.line, r.reason);
}

// Grid specification: lat-lon:NxM (sphere), cyl:NxM[:lo:hi] (cylinder),
// box:N or box:NxM (R^1, R^2, spanning the data), file:<path> (any).
std::vector<Point> build_grid(const std::string& spec, const Manifold& m, const SampleSet& sample,
                              const std::vector<std::string>& columns, bool scale_axial) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument(fmt::format("malformed grid spec '{}'", spec));
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);

  if (kind == "file") {
    auto in = ingest_points_csv(arg, m, columns, scale_axial);
    if (!in.rejected.empty()) throw DataError(fmt::format("grid file '{}' has {} invalid rows", arg, in.rejected.size()));
    return in.points;
  }
  if (kind == "lat-lon") {
    if (m.kind() != ManifoldKind::sphere) throw InvalidArgument("lat-lon grids need a sphere manifold");
    const auto [rows, cols] = parse_dims(arg);
    return lat_lon_grid(rows, cols, m.radius()).points;
  }
  if (kind == "cyl") {
    if (m.kind() != ManifoldKind::cylinder) throw InvalidArgument("cyl grids need the cylinder manifold");
    const auto parts = split(arg, ':');
    const auto [rows, cols] = parse_dims(parts[0]);
    double lo = 0.0;
    double hi = 0.0;
    if (parts.size() == 3) {
      lo = to_double(parts[1], "axial lower bound");
      hi = to_double(parts[2], "axial upper bound");
    } else if (parts.size() == 1) {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (std::size_t i = 0; i < sample.size(); ++i) {
        lo = std::min(lo, sample.point(i)[2]);
        hi = std::max(hi, sample.point(i)[2]);
      }
      const double pad = 0.1 * std::max(hi - lo, 1e-6);
      lo -= pad;
      hi += pad;
    } else {
      throw InvalidArgument("cyl grid spec is cyl:NxM or cyl:NxM:lo:hi");
    }
    return cylinder_grid(rows, cols, lo, hi).points;
  }
  if (kind == "box") {
    if (m.kind() != ManifoldKind::euclidean || m.dim() > 2) throw InvalidArgument("box grids need euclidean:1 or euclidean:2");
    std::vector<std::size_t> counts;
    if (m.dim() == 1) {
      counts = {to_size(arg, "grid size")};
    } else {
      const auto [a, b] = parse_dims(arg);
      counts = {a, b};
    }
    std::vector<double> lo(m.dim(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(m.dim(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      for (int a = 0; a < m.dim(); ++a) {
        lo[a] = std::min(lo[a], sample.point(i)[a]);
        hi[a] = std::max(hi[a], sample.point(i)[a]);
      }
    }
    for (int a = 0; a < m.dim(); ++a) {
      const double pad = 0.1 * std::max(hi[a] - lo[a], 1e-6);
      lo[a] -= pad;
      hi[a] += pad;
      if (counts[a] == 0) throw InvalidArgument("box grid needs positive sizes");
    }
    auto node = [&](int axis, std::size_t i) {
      return counts[axis] == 1 ? 0.5 * (lo[axis] + hi[axis])
                               : lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) /
                                                static_cast<double>(counts[axis] - 1);
    };
    std::vector<Point> grid;
    if (m.dim() == 1) {
      for (std::size_t i = 0; i < counts[0]; ++i) grid.push_back(Point{node(0, i)});
    } else {
      for (std::size_t i = 0; i < counts[0]; ++i) {
        for (std::size_t j = 0; j < counts[1]; ++j) grid.push_back(Point{node(0, i), node(1, j)});
      }
    }
    return grid;
  }
  throw InvalidArgument(fmt::format("unknown grid kind '{}'", kind));
}

ModelPtr make_model(const std::string& name, double kappa) { return model_by_name(name, kappa); }

Point default_point(const DensityModel& model) {
  if (model.manifold().kind() == ManifoldKind::cylinder) {
    const auto p = MardiaSuttonParams::standard();
    return cylinder_point(p.mean_angle, p.intercept + p.slope * std::cos(p.mean_angle));
  }
  return Point{0.0, 0.0, 1.0};
}

// ---------------------------------------------------------------------------

struct EstimateOptions {
  std::string data;
  std::string manifold;
  std::string columns;
  bool scale_axial = false;
  std::string estimator = "knn";
  std::size_t k = 0;
  double h = 0.0;
  std::string kernel = "quadratic";
  std::string scaling = "normalized";
  std::string grid;
  std::string output;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

int cmd_estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err) {
  const Manifold m = Manifold::parse(o.manifold);
  const auto columns = o.columns.empty() ? std::vector<std::string>{} : split(o.columns, ',');
  EstimatorConfig cfg;
  cfg.kind = parse_estimator_kind(o.estimator);
  cfg.kernel = kernel_by_name(o.kernel);
  cfg.scaling = parse_kernel_scaling(o.scaling);
  cfg.k = o.k;
  cfg.h = o.h;
  const ExportFormat format = parse_export_format(o.format);
  if (cfg.kind != EstimatorKind::fixed_bandwidth && o.k == 0) throw InvalidArgument("--k is required and must be >= 1");
  if (cfg.kind == EstimatorKind::fixed_bandwidth && !(o.h > 0.0)) throw InvalidArgument("--bandwidth is required for --estimator fixed");

  if (!fs::exists(o.data)) throw DataError(fmt::format("data file '{}' not found", o.data));
  auto in = ingest_points_csv(o.data, m, columns, o.scale_axial);
  report_rejected(err, in.rejected, in.total_rows);
  if (in.points.empty()) throw DataError(fmt::format("'{}' contains no valid rows", o.data));
  const SampleSet sample(m, in.points);
  if (cfg.kind != EstimatorKind::fixed_bandwidth && cfg.k >= sample.size()) {
    throw InvalidArgument(fmt::format("k = {} must be smaller than the sample size n = {}", cfg.k, sample.size()));
  }

  std::string grid_spec = o.grid;
  if (grid_spec.empty()) {
    if (m.kind() == ManifoldKind::sphere) grid_spec = "lat-lon:90x180";
    else if (m.kind() == ManifoldKind::cylinder) grid_spec = "cyl:90x60";
    else grid_spec = m.dim() == 1 ? "box:200" : "box:100x100";
  }
  const auto grid = build_grid(grid_spec, m, sample, columns, o.scale_axial);
  const GridEvaluation eval = evaluate_grid(sample, grid, cfg);

  const std::vector<std::pair<std::string, std::string>> meta{
      {"estimator", to_string(cfg.kind)}, {"k", std::to_string(cfg.k)},
      {"h", fmt::format("{}", cfg.h)},    {"kernel", cfg.kernel.name()},
      {"scaling", to_string(cfg.scaling)}, {"n", std::to_string(sample.size())},
      {"grid", grid_spec},                {"seed", std::to_string(o.seed)}};
  export_grid(o.output, m, grid, eval.estimates, format, meta);
  fmt::print(out, "wrote {} grid points to {}\n", grid.size(), o.output);
  if (!eval.degenerate.empty()) {
    fmt::print(err, "{} grid point(s) had a degenerate (zero) bandwidth; reported as nan\n", eval.degenerate.size());
    return kDegenerate;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  bool paper_s5 = false;
  std::string model = "uniform";
  double kappa = 0.0;
  std::size_t n = 200;
  std::size_t reps = 100;
  std::string k_grid;
  std::string k_range;
  std::string mode = "plugin";
  std::string kernel = "quadratic";
  std::string scaling = "normalized";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output;
  std::string summary;
  bool sample_only = false;
};

int cmd_sweep(const SweepOptions& o, const CLI::App& app, std::ostream& out, std::ostream&) {
  auto given = [&](const char* name) { return app.count(name) > 0; };
  ExperimentConfig cfg;
  if (o.paper_s5) {
    cfg = ExperimentConfig::simulation_study(o.model);
  } else {
    cfg.model = o.model;
    cfg.n = o.n;
    cfg.replications = o.reps;
    cfg.scaling = parse_kernel_scaling(o.scaling);
    cfg.k_grid = equidistant_k_grid(5, 150, 20);
  }
  cfg.model = o.model;
  cfg.kappa = o.kappa;
  if (given("--n")) cfg.n = o.n;
  if (given("--reps")) cfg.replications = o.reps;
  if (given("--scaling")) cfg.scaling = parse_kernel_scaling(o.scaling);
  if (given("--mode")) cfg.mode = parse_evaluation_mode(o.mode);
  if (given("--kernel")) cfg.kernel = kernel_by_name(o.kernel);
  if (given("--k-grid")) cfg.k_grid = parse_size_list(o.k_grid, "k");
  if (given("--k-range")) {
    const auto parts = split(o.k_range, ':');
    if (parts.size() != 3) throw InvalidArgument("--k-range expects lo:hi:count");
    cfg.k_grid = equidistant_k_grid(to_size(parts[0], "k"), to_size(parts[1], "k"), to_size(parts[2], "count"));
  }
  cfg.root_seed = o.seed;
  cfg.threads = std::max(1u, o.threads);

  if (o.sample_only) {
    const ModelPtr model = make_model(cfg.model, cfg.kappa);
    Rng rng = substream(cfg.root_seed, 0);
    const SampleSet sample = model->sample(rng, cfg.n);
    std::string csv;
    if (model->manifold().kind() == ManifoldKind::sphere) {
      csv = "longitude,latitude\n";
      for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto [lon, lat] = lonlat_from_sphere_point(sample.point(i));
        csv += fmt::format("{:.17g},{:.17g}\n", lon, lat);
      }
    } else {
      csv = "direction,temperature\n";
      for (std::size_t i = 0; i < sample.size(); ++i) {
        csv += fmt::format("{:.17g},{:.17g}\n", cylinder_angle(sample.point(i)) * 180.0 / std::numbers::pi,
                           sample.point(i)[2]);
      }
    }
    write_file_atomic(o.output, csv);
    fmt::print(out, "wrote {} {} draws to {}\n", sample.size(), model->name(), o.output);
    return kOk;
  }

  const SweepResult result = run_sweep(cfg);
  std::string summary_path = o.summary;
  if (summary_path.empty()) summary_path = fs::path(o.output).replace_extension(".json").string();
  if (summary_path == o.output) summary_path += ".json";
  write_file_atomic(o.output, sweep_csv(result));
  write_file_atomic(summary_path, sweep_summary_json(result));

  fmt::print(out, "model {} n={} replications={} scaling={} mode={} seed={}\n", cfg.model, cfg.n, cfg.replications,
             to_string(cfg.scaling), to_string(cfg.mode), cfg.root_seed);
  fmt::print(out, "{:>5} {:>14} {:>14} {:>8}\n", "k", "mean MSE", "mean MedSE", "excluded");
  for (const auto& a : result.per_k) {
    fmt::print(out, "{:>5} {:>14.6e} {:>14.6e} {:>8}\n", a.k, a.mean_mse, a.mean_medse, a.excluded);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ConsistencyOptions {
  std::string model = "vmf";
  double kappa = 0.0;
  std::string ladder = "250,1000,4000";
  double k_exponent = 0.7;
  std::size_t reps = 20;
  std::size_t lattice = 2000;
  double cap = -0.5;
  std::string scaling = "normalized";
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_consistency(const ConsistencyOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.k_exponent > 0.0 && o.k_exponent < 1.0)) {
    throw InvalidArgument(fmt::format(
        "--k-exponent {} invalid: k_n = n^a needs k_n -> inf, k_n / n -> 0 and k_n / log n -> inf, i.e. 0 < a < 1",
        o.k_exponent));
  }
  ConsistencyConfig cfg;
  cfg.model = make_model(o.model, o.kappa);
  if (cfg.model->manifold().kind() != ManifoldKind::sphere) {
    throw InvalidArgument("consistency diagnostic supports the sphere models (cap region)");
  }
  cfg.n_ladder = parse_size_list(o.ladder, "ladder entry");
  cfg.k_rule = power_k_rule(o.k_exponent);
  cfg.replications = o.reps;
  cfg.scaling = parse_kernel_scaling(o.scaling);
  cfg.root_seed = o.seed;
  cfg.grid = cap_grid(Point{0.0, 0.0, 1.0}, o.cap, o.lattice);
  if (cfg.grid.empty()) throw InvalidArgument("the cap region contains no lattice points");

  const ConsistencyReport report = consistency_check(cfg);
  fmt::print(out, "model {} region <x,mu> >= {} ({} grid points) replications={} seed={}\n", cfg.model->name(), o.cap,
             cfg.grid.size(), cfg.replications, cfg.root_seed);
  fmt::print(out, "{:>8} {:>6} {:>16} {:>12}\n", "n", "k", "mean sup error", "sd");
  for (const auto& l : report.levels) {
    fmt::print(out, "{:>8} {:>6} {:>16.6e} {:>12.4e}\n", l.n, l.k, l.mean_sup_error, l.sd_sup_error);
  }
  if (!report.growth_conditions_hold) {
    fmt::print(err, "warning: k/log n is not increasing or k/n is not decreasing along the ladder\n");
  }
  if (!o.output.empty()) write_file_atomic(o.output, consistency_json(report, cfg));
  return kOk;
}

struct NormalityOptions {
  std::string model = "uniform";
  double kappa = 0.0;
  std::size_t n = 20000;
  double gamma = 0.5;
  std::size_t reps = 500;
  std::string point;
  std::string scaling = "normalized";
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_normality(const NormalityOptions& o, std::ostream& out, std::ostream&) {
  NormalityConfig cfg;
  cfg.model = make_model(o.model, o.kappa);
  const int d = cfg.model->manifold().dim();
  cfg.n = o.n;
  cfg.k = normality_k(o.n, o.gamma, d);
  cfg.replications = o.reps;
  cfg.scaling = parse_kernel_scaling(o.scaling);
  cfg.root_seed = o.seed;
  cfg.point = o.point.empty() ? default_point(*cfg.model) : parse_point(o.point);
  if (cfg.replications < 1) throw InvalidArgument("--reps must be >= 1");

  const NormalitySummary s = normality_diagnostic(cfg);
  fmt::print(out, "model {} n={} k={} replications={} seed={}\n", cfg.model->name(), cfg.n, cfg.k, cfg.replications,
             cfg.root_seed);
  fmt::print(out, "f(p) = {:.6g}  sigma(p) = {:.6g}\n", s.truth, s.sigma);
  fmt::print(out, "mean {:.4f}  sd {:.4f}  skewness {:.4f}  excess kurtosis {:.4f}\n", s.mean, s.sd, s.skewness,
             s.excess_kurtosis);
  fmt::print(out, "KS statistic vs N(0,1): {:.4f}\n", s.ks_statistic);
  if (!o.output.empty()) write_file_atomic(o.output, normality_json(s, cfg));
  return kOk;
}

// ---------------------------------------------------------------------------

struct IngestOptions {
  std::string kind;
  std::string input;
  std::string columns;
  bool jitter = false;
  double xi = 0.0;
  double kappa = 1.0;
  bool scale_axial = false;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
  const auto columns = o.columns.empty() ? std::vector<std::string>{} : split(o.columns, ',');
  if (!columns.empty() && columns.size() != 2) throw InvalidArgument("--columns expects two names");
  if (!fs::exists(o.input)) throw DataError(fmt::format("input file '{}' not found", o.input));

  std::string csv;
  if (o.kind == "sphere") {
    if (o.jitter || o.scale_axial) throw InvalidArgument("--jitter and --scale-axial apply to cylinder data");
    SphereColumns cols;
    if (!columns.empty()) cols = {columns[0], columns[1]};
    const auto in = ingest_sphere_csv(o.input, cols);
    report_rejected(err, in.rejected, in.total_rows);
    const SampleSet sample = sphere_sample(in.records);
    csv = "longitude,latitude,x,y,z\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto p = sample.point(i);
      csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", in.records[i].longitude, in.records[i].latitude,
                         p[0], p[1], p[2]);
    }
    fmt::print(out, "accepted {} of {} rows\n", in.records.size(), in.total_rows);
  } else if (o.kind == "cylinder") {
    CylinderColumns cols;
    if (!columns.empty()) cols = {columns[0], columns[1]};
    const auto in = ingest_cylinder_csv(o.input, cols);
    report_rejected(err, in.rejected, in.total_rows);
    std::vector<CylinderRecord> records = in.records;
    if (o.jitter) {
      if (records.empty()) throw DataError("no valid rows to jitter");
      const double xi = o.xi > 0.0 ? o.xi : default_jitter_scale(records.size());
      Rng rng = substream(o.seed, 0);
      records = jitter_repeated_angles(records, rng, xi, o.kappa);
      fmt::print(out, "jittered repeated directions with xi = {:.6g}, kappa = {}\n", xi, o.kappa);
    }
    const SampleSet sample = cylinder_sample(records, o.scale_axial);
    csv = "direction,temperature,x,y,z\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const auto p = sample.point(i);
      csv += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", records[i].wind_direction,
                         records[i].temperature, p[0], p[1], p[2]);
    }
    fmt::print(out, "accepted {} of {} rows\n", records.size(), in.total_rows);
  } else {
    throw InvalidArgument("--kind must be sphere or cylinder");
  }
  write_file_atomic(o.output, csv);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-nearest-neighbor kernel density estimation on Riemannian manifolds"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // estimate
  EstimateOptions est;
  auto* estimate = app.add_subcommand(
      "estimate",
      "Evaluate a density estimate of a data file on a grid.\n"
      "The kNN estimators need 1 <= k < n; for consistency k should grow with n while k/n -> 0.");
  estimate->add_option("--data", est.data, "Input CSV (sphere: longitude,latitude; cylinder: direction,temperature; "
                                           "euclidean:d: x1..xd)")->required();
  estimate->add_option("--manifold", est.manifold, "euclidean:d | sphere:R | cylinder")->required();
  estimate->add_option("--columns", est.columns, "Comma-separated column names overriding the defaults");
  estimate->add_flag("--scale-axial", est.scale_axial, "Standardize the cylinder axial coordinate");
  estimate->add_option("--estimator", est.estimator, "knn | simple | fixed")->capture_default_str();
  estimate->add_option("--k", est.k, "Number of neighbors (1 <= k < n)");
  estimate->add_option("--bandwidth", est.h, "Fixed bandwidth, 0 < h < injectivity radius (estimator fixed)");
  estimate->add_option("--kernel", est.kernel, "Kernel profile")->capture_default_str();
  estimate->add_option("--scaling", est.scaling, "paper | normalized")->capture_default_str();
  estimate->add_option("--grid", est.grid, "lat-lon:NxM | cyl:NxM[:lo:hi] | box:N[xM] | file:<path>");
  estimate->add_option("--output", est.output, "Output file")->required();
  estimate->add_option("--format", est.format, "csv | json")->capture_default_str();
  estimate->add_option("--seed", est.seed, "Root seed (the estimate itself is deterministic)");

  // sweep / simulate
  SweepOptions sw;
  auto add_sweep_options = [&](CLI::App* cmd) {
    cmd->add_flag("--paper-s5", sw.paper_s5,
                  "Simulation-study preset: n=200, 1000 replications, quadratic kernel, paper scaling, "
                  "20 equidistant k in [5,150], plug-in evaluation (explicit flags override)");
    cmd->add_option("--model", sw.model, "vmf | uniform | mardia-sutton")->capture_default_str();
    cmd->add_option("--kappa", sw.kappa, "Concentration override (vmf default 3, mardia-sutton default 5)");
    cmd->add_option("--n", sw.n, "Sample size")->capture_default_str();
    cmd->add_option("--reps", sw.reps, "Replications (>= 1)")->capture_default_str();
    cmd->add_option("--k-grid", sw.k_grid, "Comma-separated k values; each must satisfy k < n");
    cmd->add_option("--k-range", sw.k_range, "lo:hi:count equidistant k values (default 5:150:20)");
    cmd->add_option("--mode", sw.mode, "plugin | loo")->capture_default_str();
    cmd->add_option("--kernel", sw.kernel, "Kernel profile")->capture_default_str();
    cmd->add_option("--scaling", sw.scaling, "paper | normalized")->capture_default_str();
    cmd->add_option("--seed", sw.seed, "Root seed; replication r uses substream r")->capture_default_str();
    cmd->add_option("--threads", sw.threads, "Worker threads (results do not depend on it)")->capture_default_str();
    cmd->add_option("--output", sw.output, "Per-replication CSV (k,replication,mse,medse)")->required();
    cmd->add_option("--summary", sw.summary, "JSON summary path (default: output with .json extension)");
  };
  auto* sweep = app.add_subcommand(
      "sweep",
      "Monte Carlo MSE/MedSE sweep over a grid of k at the sample points.\n"
      "Every k must satisfy 1 <= k < n; the estimator is consistent when k -> inf and k/n -> 0.");
  add_sweep_options(sweep);
  auto* simulate = app.add_subcommand(
      "simulate",
      "Same study as sweep; with --sample-only, write one model sample as CSV instead.\n"
      "Every k must satisfy 1 <= k < n; the estimator is consistent when k -> inf and k/n -> 0.");
  add_sweep_options(simulate);
  simulate->add_flag("--sample-only", sw.sample_only, "Write a single draw of size n (ingestible by estimate)");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Desk-scale checks of the asymptotic theory");
  diagnose->require_subcommand(1);
  ConsistencyOptions co;
  auto* consistency = diagnose->add_subcommand(
      "consistency",
      "Mean sup-norm error over a spherical cap for a ladder of n.\n"
      "k_n = ceil(n^a) must satisfy k_n -> inf, k_n/n -> 0 and k_n/log n -> inf (0 < a < 1).");
  consistency->add_option("--model", co.model, "vmf | uniform")->capture_default_str();
  consistency->add_option("--kappa", co.kappa, "vMF concentration (default 3)");
  consistency->add_option("--ladder", co.ladder, "Comma-separated sample sizes")->capture_default_str();
  consistency->add_option("--k-exponent", co.k_exponent, "a in k_n = ceil(n^a), 0 < a < 1")->capture_default_str();
  consistency->add_option("--reps", co.reps, "Replications per ladder entry")->capture_default_str();
  consistency->add_option("--lattice", co.lattice, "Fibonacci lattice size on the full sphere")->capture_default_str();
  consistency->add_option("--cap", co.cap, "Region <x, mu> >= cap")->capture_default_str();
  consistency->add_option("--scaling", co.scaling, "paper | normalized")->capture_default_str();
  consistency->add_option("--seed", co.seed, "Root seed")->capture_default_str();
  consistency->add_option("--output", co.output, "JSON report path");

  NormalityOptions no;
  auto* normality = diagnose->add_subcommand(
      "normality",
      "Standardized sqrt(k)(f_n(p) - f(p))/sigma(p) over replications, compared with N(0,1).\n"
      "k_n = ceil(n^gamma) with gamma < 4/(d+4) keeps sqrt(k_n n^(-4/(d+4))) -> 0, so the limit has no bias term "
      "(gamma < 2/3 on surfaces).");
  normality->add_option("--model", no.model, "vmf | uniform | mardia-sutton")->capture_default_str();
  normality->add_option("--kappa", no.kappa, "Concentration override");
  normality->add_option("--n", no.n, "Sample size")->capture_default_str();
  normality->add_option("--gamma", no.gamma, "k = ceil(n^gamma), 0 < gamma < 4/(d+4)")->capture_default_str();
  normality->add_option("--reps", no.reps, "Replications")->capture_default_str();
  normality->add_option("--point", no.point, "Evaluation point x,y,z (default: north pole / modal point)");
  normality->add_option("--scaling", no.scaling, "paper | normalized")->capture_default_str();
  normality->add_option("--seed", no.seed, "Root seed")->capture_default_str();
  normality->add_option("--output", no.output, "JSON report path");

  // ingest
  IngestOptions in;
  auto* ingest = app.add_subcommand("ingest", "Validate and convert a directional or cylindrical CSV");
  ingest->add_option("--kind", in.kind, "sphere | cylinder")->required();
  ingest->add_option("--input", in.input, "Input CSV")->required();
  ingest->add_option("--columns", in.columns, "Two column names (default longitude,latitude or direction,temperature)");
  ingest->add_flag("--jitter", in.jitter, "Perturb repeated directions by xi * vM(0, kappa) draws");
  ingest->add_option("--xi", in.xi, "Jitter scale (default n^(-1/5))");
  ingest->add_option("--jitter-kappa", in.kappa, "Jitter concentration")->capture_default_str();
  ingest->add_flag("--scale-axial", in.scale_axial, "Standardize the axial coordinate in x,y,z output");
  ingest->add_option("--seed", in.seed, "Root seed for the jitter")->capture_default_str();
  ingest->add_option("--output", in.output, "Output CSV")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (*estimate) return cmd_estimate(est, out, err);
    if (*sweep) return cmd_sweep(sw, *sweep, out, err);
    if (*simulate) return cmd_sweep(sw, *simulate, out, err);
    if (*consistency) return cmd_consistency(co, out, err);
    if (*normality) return cmd_normality(no, out, err);
    if (*ingest) return cmd_ingest(in, out, err);
  } catch (const InvalidArgument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsageError;
  } catch (const DataError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  } catch (const DegenerateBandwidth& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDegenerate;
  } catch (const GridEvaluationError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return e.duplicates() ? kDegenerate : kDataError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  }
  return kUsageError;
}

}  // namespace geoknn::cli
