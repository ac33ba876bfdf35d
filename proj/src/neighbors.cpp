#include "geoknn/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "geoknn/errors.hpp"

namespace geoknn {

namespace {

void check_k(const SampleSet& sample, std::size_t k) {
  if (sample.empty()) throw InvalidArgument("k-nearest-neighbor query on an empty sample");
  if (k < 1 || k > sample.size()) {
    throw InvalidArgument(fmt::format("k = {} outside [1, n = {}]", k, sample.size()));
  }
}

double kth_smallest(std::vector<double>& values, std::size_t k) {
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

// Chord-space search radius that is guaranteed to contain every point whose
// computed geodesic distance is <= bound. The absolute term absorbs rounding
// in the geodesic formulas near coincident points.
double prefilter_radius(const Manifold& m, double bound) {
  const double scale = m.kind() == ManifoldKind::sphere ? m.radius() : 1.0;
  return bound * (1.0 + 1e-9) + 1e-7 * scale;
}

}  // namespace

double knn_distance(const SampleSet& sample, Coords p, std::size_t k) {
  check_k(sample, k);
  std::vector<double> d(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) d[j] = distance(sample.manifold(), p, sample.point(j));
  return kth_smallest(d, k);
}

double clamped_bandwidth(double h, const Manifold& m) {
  if (!(h >= 0.0)) throw InvalidArgument("bandwidth must be nonnegative");
  return std::min(h, m.injectivity_radius());
}

Neighborhood brute_force_neighborhood(const SampleSet& sample, Coords p, std::size_t k) {
  check_k(sample, k);
  Neighborhood out;
  out.candidates.resize(sample.size());
  std::vector<double> d(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    d[j] = distance(sample.manifold(), p, sample.point(j));
    out.candidates[j] = {j, d[j]};
  }
  out.kth_distance = kth_smallest(d, k);
  return out;
}

NeighborIndex::NeighborIndex(const SampleSet& sample, std::size_t leaf_size)
    : sample_(&sample), stride_(sample.stride()) {
  if (leaf_size == 0) throw InvalidArgument("leaf size must be positive");
  order_.resize(sample.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  points_.resize(sample.size() * stride_);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    auto p = sample.point(i);
    std::copy(p.begin(), p.end(), points_.begin() + static_cast<std::ptrdiff_t>(i * stride_));
  }
  if (!sample.empty()) build(0, sample.size(), leaf_size);
  // Re-lay coordinates in slot order for cache-friendly leaf scans.
  std::vector<double> permuted(points_.size());
  for (std::size_t slot = 0; slot < order_.size(); ++slot) {
    auto p = sample.point(order_[slot]);
    std::copy(p.begin(), p.end(), permuted.begin() + static_cast<std::ptrdiff_t>(slot * stride_));
  }
  points_ = std::move(permuted);
}

std::size_t NeighborIndex::build(std::size_t begin, std::size_t end, std::size_t leaf_size) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0, true});
  box_lo_.resize((id + 1) * stride_);
  box_hi_.resize((id + 1) * stride_);

  // order_ is still a permutation of sample indices here; points_ is in
  // sample order during construction.
  auto at = [&](std::size_t sample_index, std::size_t axis) { return points_[sample_index * stride_ + axis]; };
  std::size_t widest = 0;
  double widest_extent = -1.0;
  for (std::size_t a = 0; a < stride_; ++a) {
    double lo = at(order_[begin], a);
    double hi = lo;
    for (std::size_t s = begin + 1; s < end; ++s) {
      const double v = at(order_[s], a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    box_lo_[id * stride_ + a] = lo;
    box_hi_[id * stride_ + a] = hi;
    if (hi - lo > widest_extent) {
      widest_extent = hi - lo;
      widest = a;
    }
  }
  if (end - begin <= leaf_size || widest_extent <= 0.0) return id;

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return at(a, widest) < at(b, widest); });
  const std::size_t left = build(begin, mid, leaf_size);
  const std::size_t right = build(mid, end, leaf_size);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].leaf = false;
  return id;
}

double NeighborIndex::box_distance_sq(std::size_t node, Coords p) const {
  double s = 0.0;
  for (std::size_t a = 0; a < stride_; ++a) {
    const double lo = box_lo_[node * stride_ + a];
    const double hi = box_hi_[node * stride_ + a];
    const double v = p[a];
    const double gap = v < lo ? lo - v : (v > hi ? v - hi : 0.0);
    s += gap * gap;
  }
  return s;
}

void NeighborIndex::knn_chord(std::size_t node, Coords p, std::size_t k,
                              std::vector<std::pair<double, std::size_t>>& heap) const {
  const Node& n = nodes_[node];
  if (n.leaf) {
    for (std::size_t slot = n.begin; slot < n.end; ++slot) {
      double s = 0.0;
      for (std::size_t a = 0; a < stride_; ++a) {
        const double diff = coord(slot, a) - p[a];
        s += diff * diff;
      }
      if (heap.size() < k) {
        heap.emplace_back(s, slot);
        std::push_heap(heap.begin(), heap.end());
      } else if (s < heap.front().first) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = {s, slot};
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double dl = box_distance_sq(n.left, p);
  const double dr = box_distance_sq(n.right, p);
  const auto first = dl <= dr ? n.left : n.right;
  const auto second = dl <= dr ? n.right : n.left;
  const double d_second = dl <= dr ? dr : dl;
  if (heap.size() < k || std::min(dl, dr) <= heap.front().first) knn_chord(first, p, k, heap);
  if (heap.size() < k || d_second <= heap.front().first) knn_chord(second, p, k, heap);
}

void NeighborIndex::radius_chord(std::size_t node, Coords p, double radius_sq,
                                 std::vector<std::size_t>& out) const {
  if (box_distance_sq(node, p) > radius_sq) return;
  const Node& n = nodes_[node];
  if (!n.leaf) {
    radius_chord(n.left, p, radius_sq, out);
    radius_chord(n.right, p, radius_sq, out);
    return;
  }
  for (std::size_t slot = n.begin; slot < n.end; ++slot) {
    double s = 0.0;
    for (std::size_t a = 0; a < stride_; ++a) {
      const double diff = coord(slot, a) - p[a];
      s += diff * diff;
    }
    if (s <= radius_sq) out.push_back(order_[slot]);
  }
}

Neighborhood NeighborIndex::neighborhood(Coords p, std::size_t k) const {
  const SampleSet& sample = *sample_;
  check_k(sample, k);
  if (p.size() != stride_) throw InvalidArgument("query point has wrong dimension");
  const Manifold& m = sample.manifold();

  // 1. k nearest in chord space; their largest geodesic distance bounds H_n(p).
  std::vector<std::pair<double, std::size_t>> heap;
  heap.reserve(k);
  knn_chord(0, p, k, heap);
  double bound = 0.0;
  for (const auto& [chord_sq, slot] : heap) {
    bound = std::max(bound, distance(m, p, sample.point(order_[slot])));
  }

  // 2. Every point with geodesic distance <= bound has chord distance <= bound.
  const double radius = prefilter_radius(m, bound);
  std::vector<std::size_t> hits;
  radius_chord(0, p, radius * radius, hits);
  std::sort(hits.begin(), hits.end());
  if (hits.size() < k) return brute_force_neighborhood(sample, p, k);  // unreachable with sane slack

  // 3. Exact geodesic order statistic over the candidates.
  Neighborhood out;
  out.candidates.reserve(hits.size());
  std::vector<double> d;
  d.reserve(hits.size());
  for (std::size_t j : hits) {
    const double dj = distance(m, p, sample.point(j));
    out.candidates.push_back({j, dj});
    d.push_back(dj);
  }
  out.kth_distance = kth_smallest(d, k);
  return out;
}

std::vector<Neighbor> NeighborIndex::within(Coords p, double radius) const {
  if (p.size() != stride_) throw InvalidArgument("query point has wrong dimension");
  std::vector<Neighbor> out;
  if (sample_->empty()) return out;
  const Manifold& m = sample_->manifold();
  const double chord_radius = prefilter_radius(m, radius);
  std::vector<std::size_t> hits;
  radius_chord(0, p, chord_radius * chord_radius, hits);
  std::sort(hits.begin(), hits.end());
  for (std::size_t j : hits) {
    const double dj = distance(m, p, sample_->point(j));
    if (dj <= radius) out.push_back({j, dj});
  }
  return out;
}

double NeighborIndex::kth_distance(Coords p, std::size_t k) const { return neighborhood(p, k).kth_distance; }

std::vector<double> knn_distance_batch(const SampleSet& sample, std::span<const Point> queries, std::size_t k) {
  check_k(sample, k);
  const NeighborIndex index(sample);
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(index.kth_distance(q, k));
  return out;
}

}  // namespace geoknn
