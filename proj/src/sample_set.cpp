#include "geoknn/sample_set.hpp"

#include <fmt/format.h>

#include "geoknn/errors.hpp"

namespace geoknn {

SampleSet::SampleSet(Manifold manifold, std::vector<double> flat_coords)
    : manifold_(manifold), coords_(std::move(flat_coords)), stride_(manifold.ambient_dim()) {
  if (coords_.size() % stride_ != 0) {
    throw InvalidArgument(fmt::format("{} coordinates do not form whole points of dimension {}",
                                      coords_.size(), stride_));
  }
  size_ = coords_.size() / stride_;
  for (std::size_t i = 0; i < size_; ++i) {
    try {
      validate_point(manifold_, point(i));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(fmt::format("sample point {}: {}", i, e.what()));
    }
  }
}

namespace {

std::vector<double> flatten(const Manifold& m, const std::vector<Point>& points) {
  std::vector<double> flat;
  flat.reserve(points.size() * m.ambient_dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != m.ambient_dim()) {
      throw InvalidArgument(fmt::format("sample point {} has {} coordinates, expected {}", i,
                                        points[i].size(), m.ambient_dim()));
    }
    flat.insert(flat.end(), points[i].coords.begin(), points[i].coords.end());
  }
  return flat;
}

}  // namespace

SampleSet::SampleSet(Manifold manifold, const std::vector<Point>& points)
    : SampleSet(manifold, flatten(manifold, points)) {}

std::vector<Point> SampleSet::points() const {
  std::vector<Point> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    auto p = point(i);
    out.emplace_back(std::vector<double>(p.begin(), p.end()));
  }
  return out;
}

SampleSet SampleSet::without(std::size_t skip) const {
  if (skip >= size_) throw InvalidArgument("leave-one-out index out of range");
  std::vector<double> flat;
  flat.reserve(coords_.size() - stride_);
  flat.insert(flat.end(), coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(skip * stride_));
  flat.insert(flat.end(), coords_.begin() + static_cast<std::ptrdiff_t>((skip + 1) * stride_), coords_.end());
  return SampleSet(manifold_, std::move(flat));
}

}  // namespace geoknn
