#include "geoknn/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "geoknn/errors.hpp"

namespace geoknn {

namespace {

constexpr double kPi = std::numbers::pi;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      field.push_back(c);
    } else if (c == ',' && !quoted) {
      out.emplace_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.emplace_back(trim(field));
  return out;
}

bool parse_double(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end && std::isfinite(value);
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    if (!have_header) {
      table.header = split_fields(line);
      have_header = true;
      continue;
    }
    table.rows.push_back({line_no, split_fields(line)});
  }
  if (!have_header) throw DataError(fmt::format("'{}' is empty (a header row is required)", path.string()));
  return table;
}

std::vector<std::size_t> locate_columns(const CsvTable& table, const std::vector<std::string>& names,
                                        const std::filesystem::path& path) {
  std::vector<std::size_t> idx;
  for (const auto& name : names) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      throw DataError(fmt::format("'{}' has no column named '{}'", path.string(), name));
    }
    idx.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  return idx;
}

// Parses the selected numeric fields of each row; rows with missing or
// non-numeric values are rejected.
template <class Accept>
void scan_rows(const CsvTable& table, const std::vector<std::size_t>& cols, const std::vector<std::string>& names,
               std::vector<RejectedRow>& rejected, Accept&& accept) {
  std::vector<double> values(cols.size());
  for (const auto& row : table.rows) {
    bool ok = true;
    for (std::size_t c = 0; c < cols.size() && ok; ++c) {
      if (cols[c] >= row.fields.size()) {
        rejected.push_back({row.line, fmt::format("missing value for '{}'", names[c])});
        ok = false;
      } else if (!parse_double(row.fields[cols[c]], values[c])) {
        rejected.push_back({row.line, fmt::format("'{}' is not a number ({})", row.fields[cols[c]], names[c])});
        ok = false;
      }
    }
    if (!ok) continue;
    if (auto reason = accept(values); !reason.empty()) rejected.push_back({row.line, std::move(reason)});
  }
}

std::string fmt_double(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{:.17g}", v); }

}  // namespace

SphereIngest ingest_sphere_csv(const std::filesystem::path& path, const SphereColumns& columns) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> names{columns.longitude, columns.latitude};
  const auto cols = locate_columns(table, names, path);
  SphereIngest out;
  out.total_rows = table.rows.size();
  scan_rows(table, cols, names, out.rejected, [&](const std::vector<double>& v) -> std::string {
    if (v[0] < -180.0 || v[0] > 180.0) return fmt::format("longitude {} outside [-180, 180]", v[0]);
    if (v[1] < -90.0 || v[1] > 90.0) return fmt::format("latitude {} outside [-90, 90]", v[1]);
    out.records.push_back({v[0], v[1]});
    return {};
  });
  return out;
}

CylinderIngest ingest_cylinder_csv(const std::filesystem::path& path, const CylinderColumns& columns) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> names{columns.direction, columns.axial};
  const auto cols = locate_columns(table, names, path);
  CylinderIngest out;
  out.total_rows = table.rows.size();
  scan_rows(table, cols, names, out.rejected, [&](const std::vector<double>& v) -> std::string {
    if (v[0] < 0.0 || v[0] >= 360.0) return fmt::format("direction {} outside [0, 360)", v[0]);
    out.records.push_back({v[0], v[1]});
    return {};
  });
  return out;
}

SampleSet sphere_sample(std::span<const DirectionalRecord> records, double radius) {
  std::vector<Point> points;
  points.reserve(records.size());
  for (const auto& r : records) points.push_back(sphere_point_from_lonlat(r.longitude, r.latitude, radius));
  return SampleSet(Manifold::sphere(radius), points);
}

SampleSet cylinder_sample(std::span<const CylinderRecord> records, bool scale_axial) {
  double mean = 0.0;
  double sd = 1.0;
  if (scale_axial) {
    if (records.size() < 2) throw DataError("axial standardization needs at least two records");
    for (const auto& r : records) mean += r.temperature;
    mean /= static_cast<double>(records.size());
    double ss = 0.0;
    for (const auto& r : records) ss += (r.temperature - mean) * (r.temperature - mean);
    sd = std::sqrt(ss / static_cast<double>(records.size() - 1));
    if (!(sd > 0.0)) throw DataError("axial standardization needs non-constant axial values");
  }
  std::vector<Point> points;
  points.reserve(records.size());
  for (const auto& r : records) {
    points.push_back(cylinder_point(r.wind_direction * kPi / 180.0, (r.temperature - mean) / sd));
  }
  return SampleSet(Manifold::cylinder(), points);
}

PointIngest ingest_points_csv(const std::filesystem::path& path, const Manifold& m,
                              const std::vector<std::string>& columns, bool scale_axial) {
  PointIngest out;
  switch (m.kind()) {
    case ManifoldKind::sphere: {
      SphereColumns cols;
      if (!columns.empty()) {
        if (columns.size() != 2) throw InvalidArgument("sphere data needs two columns (longitude,latitude)");
        cols = {columns[0], columns[1]};
      }
      auto in = ingest_sphere_csv(path, cols);
      for (const auto& r : in.records) out.points.push_back(sphere_point_from_lonlat(r.longitude, r.latitude, m.radius()));
      out.rejected = std::move(in.rejected);
      out.total_rows = in.total_rows;
      return out;
    }
    case ManifoldKind::cylinder: {
      CylinderColumns cols;
      if (!columns.empty()) {
        if (columns.size() != 2) throw InvalidArgument("cylinder data needs two columns (direction,axial)");
        cols = {columns[0], columns[1]};
      }
      auto in = ingest_cylinder_csv(path, cols);
      out.points = cylinder_sample(in.records, scale_axial).points();
      out.rejected = std::move(in.rejected);
      out.total_rows = in.total_rows;
      return out;
    }
    case ManifoldKind::euclidean: {
      std::vector<std::string> names = columns;
      if (names.empty()) {
        for (int i = 1; i <= m.dim(); ++i) names.push_back(fmt::format("x{}", i));
      }
      if (names.size() != static_cast<std::size_t>(m.dim())) {
        throw InvalidArgument(fmt::format("{} needs {} columns", m.describe(), m.dim()));
      }
      const CsvTable table = read_csv(path);
      const auto cols = locate_columns(table, names, path);
      out.total_rows = table.rows.size();
      scan_rows(table, cols, names, out.rejected, [&](const std::vector<double>& v) -> std::string {
        out.points.emplace_back(v);
        return {};
      });
      return out;
    }
  }
  return out;
}

double default_jitter_scale(std::size_t n) {
  if (n == 0) throw InvalidArgument("jitter scale needs n >= 1");
  return std::pow(static_cast<double>(n), -0.2);
}

std::vector<CylinderRecord> jitter_repeated_angles(std::span<const CylinderRecord> records, Rng& rng, double xi,
                                                   double kappa) {
  if (!(xi > 0.0)) throw InvalidArgument("jitter scale must be positive");
  std::map<double, std::size_t> counts;
  for (const auto& r : records) ++counts[r.wind_direction];
  std::vector<CylinderRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    if (counts[r.wind_direction] < 2) continue;
    const double eps = von_mises_angle(rng, 0.0, kappa);
    double angle = std::fmod(r.wind_direction * kPi / 180.0 + xi * eps, 2.0 * kPi);
    if (angle < 0.0) angle += 2.0 * kPi;
    double deg = angle * 180.0 / kPi;
    if (deg >= 360.0) deg -= 360.0;
    r.wind_direction = deg;
  }
  return out;
}

ExportFormat parse_export_format(const std::string& text) {
  if (text == "csv") return ExportFormat::csv;
  if (text == "json") return ExportFormat::json;
  throw InvalidArgument("unknown export format '" + text + "' (expected csv or json)");
}

std::string format_grid(const Manifold& m, std::span<const Point> grid, std::span<const DensityEstimate> estimates,
                        ExportFormat format, const std::vector<std::pair<std::string, std::string>>& metadata) {
  if (grid.size() != estimates.size()) {
    throw InvalidArgument(fmt::format("grid has {} points but {} estimates", grid.size(), estimates.size()));
  }
  std::vector<std::string> coord_names;
  if (m.kind() == ManifoldKind::euclidean) {
    for (int i = 1; i <= m.dim(); ++i) coord_names.push_back(fmt::format("x{}", i));
  } else {
    coord_names = {"x", "y", "z"};
  }

  if (format == ExportFormat::csv) {
    std::string out;
    for (const auto& c : coord_names) out += c + ",";
    if (m.kind() == ManifoldKind::sphere) out += "longitude,latitude,";
    if (m.kind() == ManifoldKind::cylinder) out += "direction,axial,";
    out += "density\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (double c : grid[i].coords) out += fmt_double(c) + ",";
      if (m.kind() == ManifoldKind::sphere) {
        const auto [lon, lat] = lonlat_from_sphere_point(grid[i]);
        out += fmt_double(lon) + "," + fmt_double(lat) + ",";
      } else if (m.kind() == ManifoldKind::cylinder) {
        out += fmt_double(cylinder_angle(grid[i]) * 180.0 / kPi) + "," + fmt_double(grid[i][2]) + ",";
      }
      out += fmt_double(estimates[i].value) + "\n";
    }
    return out;
  }

  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["manifold"] = m.describe();
  for (const auto& [key, value] : metadata) meta[key] = value;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    nlohmann::ordered_json row;
    row["coords"] = grid[i].coords;
    if (m.kind() == ManifoldKind::sphere) {
      const auto [lon, lat] = lonlat_from_sphere_point(grid[i]);
      row["longitude"] = lon;
      row["latitude"] = lat;
    } else if (m.kind() == ManifoldKind::cylinder) {
      row["direction"] = cylinder_angle(grid[i]) * 180.0 / kPi;
      row["axial"] = grid[i][2];
    }
    const double v = estimates[i].value;
    row["density"] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    row["bandwidth"] = estimates[i].bandwidth_used;
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json doc;
  doc["metadata"] = meta;
  doc["count"] = grid.size();
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

void export_grid(const std::filesystem::path& path, const Manifold& m, std::span<const Point> grid,
                 std::span<const DensityEstimate> estimates, ExportFormat format,
                 const std::vector<std::pair<std::string, std::string>>& metadata) {
  write_file_atomic(path, format_grid(m, grid, estimates, format, metadata));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
    out.flush();
    if (!out) throw DataError(fmt::format("failed writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
  }
}

}  // namespace geoknn
