#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geoknn/manifold.hpp"
#include "geoknn/sample_set.hpp"

namespace geoknn {

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Sample points around a query point together with the k-th nearest
/// neighbor distance H_n(p). `candidates` holds every sample point whose
/// geodesic distance is at most kth_distance (and possibly a few more),
/// ordered by sample index.
struct Neighborhood {
  double kth_distance = 0.0;
  std::vector<Neighbor> candidates;
};

/// H_n(p): k-th smallest geodesic distance from p to the sample, counting
/// duplicates with multiplicity. Brute force with linear-time selection.
double knn_distance(const SampleSet& sample, Coords p, std::size_t k);

/// zeta_n = min(H, injectivity radius).
double clamped_bandwidth(double h, const Manifold& m);

/// Every sample point with its distance to p, in sample order.
Neighborhood brute_force_neighborhood(const SampleSet& sample, Coords p, std::size_t k);

/// Static kd-tree over the embedding coordinates of a sample. Geodesic
/// distance on every supported manifold dominates the chord distance, so a
/// chord-space search can prefilter candidates; the final order statistic is
/// always taken over exact geodesic distances, which makes the result equal
/// to knn_distance() bit for bit.
///
/// The index keeps a reference to the sample, which must outlive it.
class NeighborIndex {
 public:
  explicit NeighborIndex(const SampleSet& sample, std::size_t leaf_size = 16);

  const SampleSet& sample() const noexcept { return *sample_; }

  double kth_distance(Coords p, std::size_t k) const;
  Neighborhood neighborhood(Coords p, std::size_t k) const;
  /// Sample points with geodesic distance <= radius, ordered by index.
  std::vector<Neighbor> within(Coords p, double radius) const;

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    std::size_t left;
    std::size_t right;
    bool leaf;
  };

  std::size_t build(std::size_t begin, std::size_t end, std::size_t leaf_size);
  double box_distance_sq(std::size_t node, Coords p) const;
  void knn_chord(std::size_t node, Coords p, std::size_t k,
                 std::vector<std::pair<double, std::size_t>>& heap) const;
  void radius_chord(std::size_t node, Coords p, double radius_sq, std::vector<std::size_t>& out) const;
  double coord(std::size_t slot, std::size_t axis) const { return points_[slot * stride_ + axis]; }

  const SampleSet* sample_;
  std::size_t stride_;
  std::vector<std::size_t> order_;  // slot -> sample index
  std::vector<double> points_;      // coordinates permuted by slot
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
};

/// Elementwise knn_distance() through a NeighborIndex.
std::vector<double> knn_distance_batch(const SampleSet& sample, std::span<const Point> queries, std::size_t k);

}  // namespace geoknn
