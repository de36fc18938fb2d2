#pragma once

#include "surfsketch/projection.hpp"
#include "surfsketch/vectorize.hpp"

#include <span>
#include <string>
#include <vector>

namespace surfsketch {

struct AngleStats {
  double mean_deg = 0.0;
  double std_deg = 0.0;  // population
  std::size_t count = 0;
};

struct DeviationStats {
  double mean_m = 0.0;
  double max_m = 0.0;
  double std_m = 0.0;
  double mean_pct_diagonal = 0.0;
};

struct SizeStats {
  std::size_t raw_points = 0;
  std::size_t vector_points = 0;
  std::size_t raw_bytes = 0;
  std::size_t vector_bytes = 0;
  double reduction_pct = 0.0;
};

// Turning angle at each interior vertex, from consecutive-point tangents.
// Zero-length tangents are skipped. Needs at least 3 points.
AngleStats angle_stats(std::span<const Vec3> polyline);

// For each raw point, distance to the nearest point on the vector polyline
// (point to segment).
DeviationStats deviation_stats(std::span<const Vec3> raw, std::span<const Vec3> vector_polyline,
                               double mesh_diagonal);
DeviationStats deviation_stats(const ProjectedStroke& raw, const VectorPath& vec, const Mesh& mesh);

// Bytes of the canonical point encoding (see io/csv.hpp) of the raw sample
// points versus the vector control points.
SizeStats size_stats(std::span<const Vec3> raw, std::span<const Vec3> control_points);
SizeStats size_stats(const ProjectedStroke& raw, const VectorPath& vec);

struct StrokeMetricsInput {
  std::string task_id;
  std::int64_t stroke_id = 0;
  std::vector<Vec3> raw;             // projected sample points
  std::vector<Vec3> vector_polyline; // smoothed (conformed) polyline
  std::vector<Vec3> control_points;
};

struct StrokeMetrics {
  std::string task_id;
  std::int64_t stroke_id = 0;
  AngleStats angle_before;
  AngleStats angle_after;
  DeviationStats deviation;
  SizeStats size;
};

struct MetricsReport {
  double mesh_diagonal = 0.0;
  std::vector<StrokeMetrics> strokes;  // sorted by (task_id, stroke_id)

  // Deterministic JSON document with sorted keys, strokes grouped by task.
  std::string to_json() const;
};

// Throws kEmptyReport when no stroke is given.
MetricsReport build_report(std::span<const StrokeMetricsInput> strokes, double mesh_diagonal);

}  // namespace surfsketch
