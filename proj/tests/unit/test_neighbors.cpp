#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geoknn/errors.hpp"
#include "geoknn/neighbors.hpp"
#include "support.hpp"

using namespace geoknn;
using std::numbers::pi;

namespace {

// Oracle: full sort of all geodesic distances.
double sorted_kth(const SampleSet& s, Coords p, std::size_t k) {
  std::vector<double> d;
  for (std::size_t i = 0; i < s.size(); ++i) d.push_back(distance(s.manifold(), p, s.point(i)));
  std::sort(d.begin(), d.end());
  return d[k - 1];
}

}  // namespace

TEST_CASE("knn distance examples") {
  const SampleSet line(Manifold::euclidean(1), std::vector<Point>{{0.0}, {1.0}, {3.0}});
  CHECK(knn_distance(line, Point{0.0}, 2) == 1.0);
  CHECK(knn_distance(line, Point{3.0}, 1) == 0.0);

  const SampleSet sph(Manifold::sphere(1), std::vector<Point>{{1, 0, 0}, {0, 1, 0}, {0, 0, -1}});
  CHECK(knn_distance(sph, Point{0, 0, 1}, 2) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(knn_distance(sph, Point{0, 0, 1}, 3) == doctest::Approx(pi).epsilon(1e-15));

  CHECK_THROWS_AS(knn_distance(line, Point{0.0}, 4), InvalidArgument);
  CHECK_THROWS_AS(knn_distance(line, Point{0.0}, 0), InvalidArgument);
  const SampleSet empty(Manifold::euclidean(1), std::vector<double>{});
  CHECK_THROWS_AS(knn_distance(empty, Point{0.0}, 1), InvalidArgument);
}

TEST_CASE("duplicates count with multiplicity") {
  const SampleSet s(Manifold::euclidean(1), std::vector<Point>{{0.0}, {0.0}, {0.0}, {2.0}});
  CHECK(knn_distance(s, Point{0.0}, 3) == 0.0);
  CHECK(knn_distance(s, Point{0.0}, 4) == 2.0);
  const NeighborIndex idx(s);
  CHECK(idx.kth_distance(Point{0.0}, 3) == 0.0);
  CHECK(idx.kth_distance(Point{0.0}, 4) == 2.0);
}

TEST_CASE("clamped bandwidth") {
  CHECK(clamped_bandwidth(0.5, Manifold::sphere(1)) == 0.5);
  CHECK(clamped_bandwidth(4.0, Manifold::cylinder()) == pi);
  CHECK(clamped_bandwidth(1e6, Manifold::euclidean(2)) == 1e6);
}

TEST_CASE("index equals brute force on randomized cases") {
  std::mt19937_64 rng(2024);
  for (const auto& m : testing::test_manifolds()) {
    CAPTURE(m.describe());
    for (int c = 0; c < 40; ++c) {
      const std::size_t n = 1 + rng() % 300;
      const SampleSet s = testing::random_sample(rng, m, n, 1.0 + (rng() % 4));
      const NeighborIndex idx(s, 1 + rng() % 20);
      for (int q = 0; q < 10; ++q) {
        const auto at = s.point(rng() % n);
        const Point p = (q % 3 == 0) ? Point(std::vector<double>(at.begin(), at.end())) : testing::random_point(rng, m);
        const std::size_t k = 1 + rng() % n;
        const double brute = knn_distance(s, p, k);
        REQUIRE(brute == sorted_kth(s, p, k));
        REQUIRE(idx.kth_distance(p, k) == brute);
        const auto hood = idx.neighborhood(p, k);
        REQUIRE(hood.kth_distance == brute);
        // Every point within the k-th distance is a candidate.
        std::size_t inside = 0;
        for (std::size_t i = 0; i < n; ++i) inside += distance(m, p, s.point(i)) <= brute ? 1 : 0;
        std::size_t listed = 0;
        for (const auto& nb : hood.candidates) listed += nb.distance <= brute ? 1 : 0;
        REQUIRE(listed == inside);
        REQUIRE(std::is_sorted(hood.candidates.begin(), hood.candidates.end(),
                               [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; }));
      }
    }
  }
}

TEST_CASE("batch queries") {
  std::mt19937_64 rng(8);
  const auto m = Manifold::sphere(1);
  const SampleSet s = testing::random_sample(rng, m, 500);
  const auto queries = testing::random_points(rng, m, 200);
  const auto batch = knn_distance_batch(s, queries, 7);
  REQUIRE(batch.size() == 200);
  for (std::size_t i = 0; i < queries.size(); ++i) CHECK(batch[i] == knn_distance(s, queries[i], 7));

  const auto single = knn_distance_batch(s, std::vector<Point>{queries[0]}, 3);
  CHECK(single == std::vector<double>{knn_distance(s, queries[0], 3)});

  const auto self = knn_distance_batch(s, s.points(), 1);
  CHECK(std::all_of(self.begin(), self.end(), [](double d) { return d == 0.0; }));
  CHECK_THROWS_AS(knn_distance_batch(s, queries, 501), InvalidArgument);
}

TEST_CASE("radius queries") {
  std::mt19937_64 rng(81);
  const auto m = Manifold::cylinder();
  const SampleSet s = testing::random_sample(rng, m, 400, 2.0);
  const NeighborIndex idx(s);
  for (int t = 0; t < 50; ++t) {
    const Point p = testing::random_point(rng, m, 2.0);
    const double r = 0.05 + 0.05 * t;
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (distance(m, p, s.point(i)) <= r) expect.push_back(i);
    }
    std::vector<std::size_t> got;
    for (const auto& nb : idx.within(p, r)) got.push_back(nb.index);
    REQUIRE(got == expect);
  }
}

TEST_CASE("monotonicity in k and n") {
  std::mt19937_64 rng(4);
  for (const auto& m : testing::test_manifolds()) {
    auto pts = testing::random_points(rng, m, 200);
    const Point p = testing::random_point(rng, m);
    const SampleSet s(m, pts);
    for (std::size_t k = 1; k < 200; ++k) REQUIRE(knn_distance(s, p, k) <= knn_distance(s, p, k + 1));
    const double before = knn_distance(s, p, 10);
    auto more = testing::random_points(rng, m, 50);
    pts.insert(pts.end(), more.begin(), more.end());
    CHECK(knn_distance(SampleSet(m, pts), p, 10) <= before);
  }
}

TEST_CASE("kth distance shrinks as n grows") {
  std::mt19937_64 rng(12);
  const auto m = Manifold::sphere(1);
  const auto queries = testing::random_points(rng, m, 50);
  double previous = 10.0;
  for (std::size_t n : {500, 1000, 2000, 4000}) {
    const SampleSet s = testing::random_sample(rng, m, n);
    const std::size_t k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    auto d = knn_distance_batch(s, queries, k);
    std::nth_element(d.begin(), d.begin() + 25, d.end());
    CHECK(d[25] < previous);
    previous = d[25];
  }
}
