#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "geoknn/errors.hpp"
#include "geoknn/experiments.hpp"
#include "geoknn/neighbors.hpp"

using namespace geoknn;

TEST_CASE("error criteria") {
  const std::vector<double> a{0.3, 0.7}, z{0.0, 0.0};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(std::vector<double>{1, 2}, z) == 2.5);
  CHECK(mse(std::vector<double>{0.5}, std::vector<double>{0.25}) == 0.0625);
  CHECK(medse(a, a) == 0.0);
  CHECK(medse(std::vector<double>{0, 1, 4}, std::vector<double>{0, 0, 0}) == 1.0);
  CHECK(median({1.0, 9.0}) == 5.0);
  CHECK_THROWS_AS(mse(a, std::vector<double>{1.0}), InvalidArgument);
  CHECK_THROWS_AS(mse(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
  CHECK(mse(std::vector<double>{1, 3}, std::vector<double>{1, 3.5}) > 0.0);
}

TEST_CASE("k grids and configuration") {
  CHECK(equidistant_k_grid(5, 150, 20) ==
        std::vector<std::size_t>{5, 13, 20, 28, 36, 43, 51, 58, 66, 74, 81, 89, 97, 104, 112, 119, 127, 135, 142, 150});
  CHECK(equidistant_k_grid(4, 4, 1) == std::vector<std::size_t>{4});
  const auto cfg = ExperimentConfig::simulation_study("vmf");
  CHECK(cfg.n == 200);
  CHECK(cfg.replications == 1000);
  CHECK(cfg.scaling == KernelScaling::paper_faithful);
  CHECK(cfg.k_grid.size() == 20);
  CHECK_NOTHROW(cfg.validate());

  ExperimentConfig bad = cfg;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.k_grid = {200};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.k_grid.clear();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.model = "cauchy";
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(parse_evaluation_mode("loo") == EvaluationMode::leave_one_out);
  CHECK(to_string(EvaluationMode::plug_in) == "plugin");
}

TEST_CASE("sweep produces one record per (k, replication)") {
  ExperimentConfig cfg;
  cfg.model = "uniform";
  cfg.n = 100;
  cfg.replications = 1;
  cfg.k_grid = {10};
  const auto r = run_sweep(cfg);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].k == 10);
  CHECK(r.records[0].mse >= 0.0);
  CHECK(r.per_k.size() == 1);
  CHECK(r.per_k[0].mean_mse == r.records[0].mse);
}

TEST_CASE("sweep determinism and thread independence") {
  ExperimentConfig cfg;
  cfg.model = "mardia-sutton";
  cfg.n = 150;
  cfg.replications = 12;
  cfg.k_grid = {5, 20, 60};
  cfg.root_seed = 42;
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  cfg.threads = 4;
  const auto c = run_sweep(cfg);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(sweep_csv(a) == sweep_csv(c));
  CHECK(sweep_summary_json(a) == sweep_summary_json(b));
  CHECK(a.config_hash == c.config_hash);
  cfg.root_seed = 43;
  CHECK(sweep_csv(run_sweep(cfg)) != sweep_csv(a));

  const auto csv = sweep_csv(a);
  CHECK(csv.rfind("k,replication,mse,medse\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 36);
  const auto j = nlohmann::json::parse(sweep_summary_json(a));
  CHECK(j["per_k"].size() == 3);
  CHECK(j["seed"] == 42);
}

TEST_CASE("sample point estimates agree with the pointwise estimator") {
  const auto model = von_mises_fisher(Point{0, 0, 1}, 3.0);
  Rng rng = substream(9, 0);
  const SampleSet s = model->sample(rng, 120);
  const Kernel k = effective_kernel(quadratic_kernel(), KernelScaling::normalized, 2);
  const auto plug = estimates_at_sample_points(s, 15, k, EvaluationMode::plug_in);
  const auto loo = estimates_at_sample_points(s, 15, k, EvaluationMode::leave_one_out);
  for (std::size_t i = 0; i < s.size(); i += 7) {
    CHECK(plug[i] == knn_kernel_estimate(s, s.point(i), 15, quadratic_kernel()).value);
    const SampleSet rest = s.without(i);
    CHECK(loo[i] == knn_kernel_estimate(rest, s.point(i), 15, quadratic_kernel()).value);
  }
}

TEST_CASE("degenerate replications are excluded and counted") {
  // A sample with three coincident points makes k = 2 degenerate there.
  std::vector<Point> pts{{0, 0, 1}, {0, 0, 1}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}};
  const SampleSet s(Manifold::sphere(1), pts);
  const Kernel k = quadratic_kernel();
  const auto e = estimates_at_sample_points(s, 2, k, EvaluationMode::plug_in);
  CHECK(std::isnan(e[0]));
  CHECK(std::isnan(e[2]));
  CHECK(std::isfinite(e[3]));
}

TEST_CASE("sup error") {
  const auto model = uniform_sphere();
  const std::vector<Point> grid{{0, 0, 1}, {1, 0, 0}};
  CHECK(sup_error(grid, [&](Coords p) { return model->density(p); }, *model) == 0.0);
  CHECK(sup_error(std::vector<Point>{{0, 0, 1}}, [](Coords) { return 1.0; }, *model) ==
        doctest::Approx(1.0 - 1 / (4 * std::numbers::pi)));
}

TEST_CASE("consistency harness") {
  CHECK(power_k_rule(0.7)(1000) == static_cast<std::size_t>(std::ceil(std::pow(1000.0, 0.7))));
  CHECK_THROWS_AS(power_k_rule(1.0), InvalidArgument);
  const auto grid = cap_grid(Point{0, 0, 1}, -0.5, 400);
  CHECK(grid.size() > 250);
  CHECK(std::all_of(grid.begin(), grid.end(), [](const Point& p) { return p[2] >= -0.5; }));

  ConsistencyConfig cfg;
  cfg.model = von_mises_fisher(Point{0, 0, 1}, 3.0);
  cfg.n_ladder = {300};
  cfg.k_rule = power_k_rule(0.7);
  cfg.grid = grid;
  cfg.replications = 3;
  const auto rep = consistency_check(cfg);
  REQUIRE(rep.levels.size() == 1);
  CHECK(rep.levels[0].sup_errors.size() == 3);
  CHECK(rep.levels[0].k == 55);
  CHECK(consistency_json(rep, cfg) == consistency_json(consistency_check(cfg), cfg));
}

TEST_CASE("normality harness") {
  CHECK(max_normality_exponent(2) == doctest::Approx(2.0 / 3.0));
  CHECK(normality_k(20000, 0.5, 2) == 142);
  CHECK_THROWS_AS(normality_k(20000, 2.0 / 3.0, 2), InvalidArgument);
  CHECK_THROWS_AS(normality_k(20000, 0.0, 2), InvalidArgument);

  NormalityConfig cfg;
  cfg.model = uniform_sphere();
  cfg.point = Point{0, 0, 1};
  cfg.n = 500;
  cfg.k = 23;
  cfg.replications = 1;
  const auto one = normality_diagnostic(cfg);
  CHECK(one.standardized.size() == 1);

  cfg.replications = 40;
  const auto a = normality_diagnostic(cfg);
  cfg.sigma_override = 2.0 * a.sigma;
  const auto b = normality_diagnostic(cfg);
  CHECK(b.sd == doctest::Approx(a.sd / 2.0).epsilon(1e-12));
  CHECK(b.mean == doctest::Approx(a.mean / 2.0).epsilon(1e-12));

  CHECK(ks_distance_to_standard_normal({0.0}) == doctest::Approx(0.5));
  std::vector<double> quantiles;
  for (int i = 1; i < 1000; ++i) {
    // Probit by bisection on erfc.
    const double u = i / 1000.0;
    double lo = -10, hi = 10;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
    }
    quantiles.push_back(0.5 * (lo + hi));
  }
  CHECK(ks_distance_to_standard_normal(quantiles) <= 1.0 / 1000 + 1e-9);
}
