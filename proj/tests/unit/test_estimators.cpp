#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoknn/errors.hpp"
#include "geoknn/estimators.hpp"
#include "geoknn/models.hpp"
#include "geoknn/random.hpp"
#include "support.hpp"

using namespace geoknn;
using std::numbers::pi;

namespace {

EstimatorConfig knn_config(std::size_t k, KernelScaling scaling = KernelScaling::paper_faithful) {
  EstimatorConfig c;
  c.kind = EstimatorKind::knn_kernel;
  c.k = k;
  c.scaling = scaling;
  return c;
}

SampleSet line_sample(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(Point{x});
  return SampleSet(Manifold::euclidean(1), pts);
}

}  // namespace

TEST_CASE("hand-evaluated one dimensional examples") {
  const Kernel k = quadratic_kernel();
  const auto boundary = line_sample({-0.5, 0.5, 2.0});
  const auto b = knn_kernel_estimate(boundary, Point{0.0}, 2, k, KernelScaling::paper_faithful);
  CHECK(b.value == 0.0);
  CHECK(b.bandwidth_used == 0.5);

  const auto s = line_sample({-0.25, 0.5, 2.0});
  const auto e = knn_kernel_estimate(s, Point{0.0}, 2, k, KernelScaling::paper_faithful);
  CHECK(e.value == 0.52734375 / 1.5);
  CHECK(e.value == doctest::Approx(0.351562).epsilon(1e-6));
  const auto f = fixed_bandwidth_estimate(s, Point{0.0}, 0.5, k, KernelScaling::paper_faithful);
  CHECK(f.value == e.value);

  // d = 1: c_1 = 1, so both scalings agree.
  CHECK(knn_kernel_estimate(s, Point{0.0}, 2, k, KernelScaling::normalized).value == doctest::Approx(e.value));
}

TEST_CASE("single sphere point at the query") {
  const SampleSet s(Manifold::sphere(1), std::vector<Point>{{0, 0, 1}});
  const auto e = fixed_bandwidth_estimate(s, Point{0, 0, 1}, 0.5, quadratic_kernel(), KernelScaling::paper_faithful);
  CHECK(e.value == doctest::Approx(3.75).epsilon(1e-15));
  CHECK_THROWS_AS(fixed_bandwidth_estimate(s, Point{0, 0, 1}, pi, quadratic_kernel()), InvalidArgument);
  CHECK_THROWS_AS(fixed_bandwidth_estimate(s, Point{0, 0, 1}, 0.0, quadratic_kernel()), InvalidArgument);
}

TEST_CASE("empty kernel sum") {
  const SampleSet s(Manifold::sphere(1), std::vector<Point>{{1, 0, 0}, {0, 1, 0}});
  CHECK(fixed_bandwidth_estimate(s, Point{0, 0, 1}, 0.5, quadratic_kernel()).value == 0.0);
}

TEST_CASE("simple kNN estimator") {
  // 10 points within 0.2 of the origin (the 10th exactly at 0.2), 90 far away.
  std::vector<Point> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(Point{0.01 * i, 0.0});
  pts.push_back(Point{0.0, 0.2});
  for (int i = 0; i < 90; ++i) pts.push_back(Point{10.0 + i, 5.0});
  const SampleSet s(Manifold::euclidean(2), pts);
  const auto e = simple_knn_estimate(s, Point{0.0, 0.0}, 10);
  CHECK(e.value == doctest::Approx(10.0 / (100 * 0.04 * pi)).epsilon(1e-14));
  CHECK(e.value == doctest::Approx(0.795775).epsilon(1e-6));

  const auto all = line_sample({0.0, 0.25, 1.0});
  const auto cover = simple_knn_estimate(all, Point{0.0}, 3);
  CHECK(cover.value == doctest::Approx(1.0 / (1.0 * unit_ball_volume(1))));
}

TEST_CASE("degenerate bandwidth") {
  const auto s = line_sample({1.0, 1.0, 1.0, 4.0});
  CHECK_THROWS_AS(knn_kernel_estimate(s, Point{1.0}, 3, quadratic_kernel()), DegenerateBandwidth);
  try {
    (void)knn_kernel_estimate(s, Point{1.0}, 2, quadratic_kernel());
    FAIL("expected DegenerateBandwidth");
  } catch (const DegenerateBandwidth& e) {
    CHECK(e.duplicates() == 3);
  }
  CHECK_NOTHROW(knn_kernel_estimate(s, Point{1.0}, 4, quadratic_kernel()));
  CHECK_THROWS_AS(simple_knn_estimate(s, Point{1.0}, 2), DegenerateBandwidth);
  CHECK_THROWS_AS(knn_kernel_estimate(s, Point{1.0}, 5, quadratic_kernel()), InvalidArgument);

  const std::vector<Point> grid{{0.0}, {1.0}, {2.0}};
  EstimatorConfig cfg = knn_config(2);
  try {
    (void)estimate_on_grid(s, grid, cfg);
    FAIL("expected GridEvaluationError");
  } catch (const GridEvaluationError& e) {
    CHECK(e.grid_index() == 1);
    CHECK(e.duplicates() == 3);
  }
  const auto eval = evaluate_grid(s, grid, cfg);
  CHECK(eval.degenerate == std::vector<std::size_t>{1});
  CHECK(std::isnan(eval.estimates[1].value));
  CHECK(std::isfinite(eval.estimates[0].value));
}

TEST_CASE("cylinder bandwidth is clamped at the injectivity radius") {
  const SampleSet s(Manifold::cylinder(), std::vector<Point>{cylinder_point(0, 0), cylinder_point(0, 10)});
  const auto e = knn_kernel_estimate(s, cylinder_point(0, 0.5), 2, quadratic_kernel(), KernelScaling::paper_faithful);
  CHECK(e.bandwidth_used == pi);
  CHECK(e.value == doctest::Approx(quadratic_kernel()(0.5 / pi) / (2 * pi * pi)));
}

TEST_CASE("Monte Carlo accuracy on the uniform sphere") {
  // Coverage of a +-15% band around 1/(4 pi). The asymptotic law gives a
  // relative sd of sqrt(lambda(V_1) int K^2 / k) for the kernel estimator and
  // 1/sqrt(k) for the simple one; the band coverage must match that normal
  // prediction to within 4 binomial standard errors.
  const auto model = uniform_sphere();
  const double truth = 1.0 / (4 * pi);
  const int reps = 400;
  const double rel_knn = std::sqrt(pi * squared_integral(effective_kernel(quadratic_kernel(), KernelScaling::normalized, 2), 2) / 150.0);
  const double rel_simple = 1.0 / std::sqrt(100.0);
  auto coverage = [](double rel_sd) { return std::erf(0.15 / rel_sd / std::sqrt(2.0)); };
  int knn_ok = 0, simple_ok = 0;
  double knn_bias = 0;
  for (int r = 0; r < reps; ++r) {
    Rng rng = substream(7, r);
    const SampleSet s = model->sample(rng, 2000);
    const Point p = testing::random_point(rng, s.manifold());
    const double v = knn_kernel_estimate(s, p, 150, quadratic_kernel(), KernelScaling::normalized).value;
    const double w = simple_knn_estimate(s, p, 100).value;
    knn_bias += (v / truth - 1) / reps;
    knn_ok += std::abs(v - truth) <= 0.15 * truth ? 1 : 0;
    simple_ok += std::abs(w - truth) <= 0.15 * truth ? 1 : 0;
  }
  const auto se = [&](double q) { return std::sqrt(q * (1 - q) / reps); };
  const double pk = coverage(rel_knn), ps = coverage(rel_simple);
  CHECK(std::abs(knn_ok / double(reps) - pk) <= 4 * se(pk));
  CHECK(std::abs(simple_ok / double(reps) - ps) <= 4 * se(ps));
  CHECK(std::abs(knn_bias) <= 4 * rel_knn / std::sqrt(double(reps)));
}

TEST_CASE("index and brute force agree bitwise; grid equals pointwise") {
  std::mt19937_64 rng(31);
  for (int g = 0; g < 50; ++g) {
    const auto& m = testing::test_manifolds()[g % testing::test_manifolds().size()];
    const SampleSet s = testing::random_sample(rng, m, 50 + rng() % 200, 2.0);
    const auto grid = testing::random_points(rng, m, 20, 2.0);
    EstimatorConfig cfg = knn_config(1 + rng() % 30, g % 2 ? KernelScaling::normalized : KernelScaling::paper_faithful);
    cfg.kind = g % 5 == 4 ? EstimatorKind::simple_knn : EstimatorKind::knn_kernel;
    const DensityEstimator brute(s, cfg, false), indexed(s, cfg, true);
    const auto batch = estimate_on_grid(s, grid, cfg);
    REQUIRE(batch.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto a = brute(grid[i]);
      REQUIRE(a.value == indexed(grid[i]).value);
      REQUIRE(a.value == batch[i].value);
      REQUIRE(a.bandwidth_used == batch[i].bandwidth_used);
      REQUIRE(a.value >= 0.0);
    }
  }
  const SampleSet s = testing::random_sample(rng, Manifold::sphere(1), 30);
  CHECK(estimate_on_grid(s, std::vector<Point>{}, knn_config(3)).empty());
  const auto self = estimate_on_grid(s, s.points(), knn_config(2));
  CHECK(self.size() == 30);
  CHECK(std::all_of(self.begin(), self.end(), [](const DensityEstimate& e) { return std::isfinite(e.value); }));
}

TEST_CASE("fixed bandwidth equals kNN when h is the k-th distance") {
  std::mt19937_64 rng(77);
  for (const auto& m : testing::test_manifolds()) {
    const SampleSet s = testing::random_sample(rng, m, 120, 2.0);
    const Point p = testing::random_point(rng, m, 2.0);
    const double h = knn_distance(s, p, 15);
    if (!(h < m.injectivity_radius())) continue;
    const auto a = knn_kernel_estimate(s, p, 15, quadratic_kernel());
    const auto b = fixed_bandwidth_estimate(s, p, h, quadratic_kernel());
    CHECK(a.value == b.value);
  }
}

TEST_CASE("scaling equivariance in R^d") {
  std::mt19937_64 rng(5);
  for (int d = 1; d <= 3; ++d) {
    const auto m = Manifold::euclidean(d);
    const auto pts = testing::random_points(rng, m, 150);
    const auto queries = testing::random_points(rng, m, 20);
    for (double c : {2.0, 3.7}) {
      std::vector<Point> scaled;
      for (const auto& p : pts) {
        Point q = p;
        for (auto& v : q.coords) v *= c;
        scaled.push_back(q);
      }
      const SampleSet a(m, pts), b(m, scaled);
      for (const auto& q : queries) {
        Point qs = q;
        for (auto& v : qs.coords) v *= c;
        const double ea = knn_kernel_estimate(a, q, 12, quadratic_kernel()).value;
        const double eb = knn_kernel_estimate(b, qs, 12, quadratic_kernel()).value;
        if (c == 2.0) {
          REQUIRE(eb == ea / std::pow(2.0, d));
        } else {
          REQUIRE(eb == doctest::Approx(ea / std::pow(c, d)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("permuting the sample leaves estimates bit-identical") {
  std::mt19937_64 rng(13);
  for (const auto& m : testing::test_manifolds()) {
    auto pts = testing::random_points(rng, m, 300, 1.0);
    const auto queries = testing::random_points(rng, m, 25, 1.0);
    const SampleSet a(m, pts);
    std::shuffle(pts.begin(), pts.end(), rng);
    const SampleSet b(m, pts);
    for (const auto& q : queries) {
      REQUIRE(knn_kernel_estimate(a, q, 40, quadratic_kernel()).value ==
              knn_kernel_estimate(b, q, 40, quadratic_kernel()).value);
    }
  }
}

TEST_CASE("estimator names and configuration checks") {
  CHECK(parse_estimator_kind("knn") == EstimatorKind::knn_kernel);
  CHECK(parse_estimator_kind("simple") == EstimatorKind::simple_knn);
  CHECK(parse_estimator_kind("fixed") == EstimatorKind::fixed_bandwidth);
  CHECK_THROWS_AS(parse_estimator_kind("nw"), InvalidArgument);
  const SampleSet s(Manifold::sphere(1), std::vector<Point>{{0, 0, 1}});
  EstimatorConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(DensityEstimator(s, cfg), InvalidArgument);
  cfg.kind = EstimatorKind::fixed_bandwidth;
  cfg.h = 4.0;
  CHECK_THROWS_AS(DensityEstimator(s, cfg), InvalidArgument);
  CHECK_THROWS_AS(DensityEstimator(s, knn_config(1))(Point{0, 0, 2}), InvalidArgument);
}
