#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geoknn/estimators.hpp"
#include "geoknn/manifold.hpp"
#include "geoknn/random.hpp"
#include "geoknn/sample_set.hpp"

namespace geoknn {

/// Longitude in [-180, 180] (east positive), latitude in [-90, 90], degrees.
struct DirectionalRecord {
  double longitude;
  double latitude;
  bool operator==(const DirectionalRecord&) const = default;
};

/// Direction in degrees [0, 360), axial value (e.g. temperature in deg C).
struct CylinderRecord {
  double wind_direction;
  double temperature;
  bool operator==(const CylinderRecord&) const = default;
};

struct RejectedRow {
  std::size_t line;  // 1-based line in the file, header is line 1
  std::string reason;
};

struct SphereColumns {
  std::string longitude = "longitude";
  std::string latitude = "latitude";
};

struct CylinderColumns {
  std::string direction = "direction";
  std::string axial = "temperature";
};

struct SphereIngest {
  std::vector<DirectionalRecord> records;
  std::vector<RejectedRow> rejected;
  std::size_t total_rows = 0;  // records.size() + rejected.size()
};

struct CylinderIngest {
  std::vector<CylinderRecord> records;
  std::vector<RejectedRow> rejected;
  std::size_t total_rows = 0;
};

/// Comma-separated, header row required, '.' decimal point. Rows with
/// unparsable or out-of-range values are rejected with their line number;
/// a missing column or an empty file throws DataError.
SphereIngest ingest_sphere_csv(const std::filesystem::path& path, const SphereColumns& columns = {});
CylinderIngest ingest_cylinder_csv(const std::filesystem::path& path, const CylinderColumns& columns = {});

/// (lon, lat) -> (cos lat cos lon, cos lat sin lon, sin lat) scaled by radius.
SampleSet sphere_sample(std::span<const DirectionalRecord> records, double radius = 1.0);

/// (direction, axial) -> (cos r, sin r, s). With scale_axial the axial values
/// are standardized to zero mean and unit sample standard deviation.
SampleSet cylinder_sample(std::span<const CylinderRecord> records, bool scale_axial = false);

/// Reads points of any supported manifold from a CSV: lon/lat columns for
/// the sphere, direction/axial for the cylinder, `columns` (default x1..xd)
/// for R^d. Invalid rows are rejected rather than dropped silently.
struct PointIngest {
  std::vector<Point> points;
  std::vector<RejectedRow> rejected;
  std::size_t total_rows = 0;
};
PointIngest ingest_points_csv(const std::filesystem::path& path, const Manifold& m,
                              const std::vector<std::string>& columns = {}, bool scale_axial = false);

/// xi = n^(-1/5).
double default_jitter_scale(std::size_t n);

/// Replaces every direction that occurs more than once by r + xi * eps
/// (mod 360 degrees), eps drawn from the circular von Mises law with mean
/// direction (1, 0) and concentration kappa. Unique directions pass through.
std::vector<CylinderRecord> jitter_repeated_angles(std::span<const CylinderRecord> records, Rng& rng, double xi,
                                                   double kappa = 1.0);

enum class ExportFormat { csv, json };
ExportFormat parse_export_format(const std::string& text);

/// Grid evaluations as CSV (coordinates, lon/lat on the sphere or
/// direction/axial on the cylinder, density) or JSON (metadata plus rows),
/// in grid order.
std::string format_grid(const Manifold& m, std::span<const Point> grid, std::span<const DensityEstimate> estimates,
                        ExportFormat format, const std::vector<std::pair<std::string, std::string>>& metadata = {});

void export_grid(const std::filesystem::path& path, const Manifold& m, std::span<const Point> grid,
                 std::span<const DensityEstimate> estimates, ExportFormat format,
                 const std::vector<std::pair<std::string, std::string>>& metadata = {});

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace geoknn
