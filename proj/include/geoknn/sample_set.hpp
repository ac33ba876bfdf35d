#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "geoknn/manifold.hpp"

namespace geoknn {

/// An immutable sample x_1, ..., x_n on one manifold. Coordinates are stored
/// contiguously, point i occupying [i * ambient_dim, (i + 1) * ambient_dim).
class SampleSet {
 public:
  /// Validates every point against the manifold.
  SampleSet(Manifold manifold, std::vector<double> flat_coords);
  SampleSet(Manifold manifold, const std::vector<Point>& points);

  const Manifold& manifold() const noexcept { return manifold_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::size_t stride() const noexcept { return stride_; }

  Coords point(std::size_t i) const { return Coords(coords_).subspan(i * stride_, stride_); }
  std::span<const double> flat() const noexcept { return coords_; }
  std::vector<Point> points() const;

  /// Copy with point `skip` removed (leave-one-out evaluation).
  SampleSet without(std::size_t skip) const;

 private:
  Manifold manifold_;
  std::vector<double> coords_;
  std::size_t stride_;
  std::size_t size_;
};

}  // namespace geoknn
