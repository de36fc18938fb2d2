#pragma once

#include "surfsketch/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace surfsketch::io {

inline constexpr std::string_view kStrokeCsvHeader = "stroke_id,kind,point_index,x,y,z";

// Fixed six-decimal, locale-independent formatting of meters.
std::string format_coordinate(double value);

// Canonical geometry encoding used for data-size comparisons: one `x,y,z`
// row per point, no header.
std::string encode_points(std::span<const Vec3> points);

struct ExportStroke {
  std::int64_t stroke_id = 0;
  std::vector<Vec3> raw;       // projected sample points (may be empty for tapline paths)
  std::vector<Vec3> vector;    // control points (empty if not vectorized)
  std::vector<Vec3> smoothed;  // optional conformed polyline
};

// `stroke_id,kind,point_index,x,y,z` rows ordered by stroke id, then kind
// (raw, smoothed, vector), then point index. Throws kArgument for an empty
// list or non-finite coordinates.
std::string export_csv(std::span<const ExportStroke> strokes, bool include_smoothed = false);

struct CsvRow {
  std::int64_t stroke_id = 0;
  std::string kind;
  std::size_t point_index = 0;
  Vec3 position = Vec3::Zero();
};

std::vector<CsvRow> parse_stroke_csv(std::string_view text);

}  // namespace surfsketch::io
