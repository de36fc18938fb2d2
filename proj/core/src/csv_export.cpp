#include "surfsketch/io/csv.hpp"

#include "surfsketch/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace surfsketch::io {

std::string format_coordinate(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::kArgument, "coordinate is not finite");
  // Values that round to zero print as 0.000000, never -0.000000.
  if (std::abs(value) < 5e-7) value = 0.0;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 6);
  if (ec != std::errc()) fail(ErrorCode::kArgument, "coordinate out of range");
  return std::string(buf, ptr);
}

namespace {

void append_xyz(std::string& out, const Vec3& p) {
  out += format_coordinate(p.x());
  out += ',';
  out += format_coordinate(p.y());
  out += ',';
  out += format_coordinate(p.z());
  out += '\n';
}

void append_rows(std::string& out, std::int64_t id, std::string_view kind,
                 std::span<const Vec3> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    out += std::to_string(id);
    out += ',';
    out += kind;
    out += ',';
    out += std::to_string(i);
    out += ',';
    append_xyz(out, points[i]);
  }
}

}  // namespace

std::string encode_points(std::span<const Vec3> points) {
  std::string out;
  out.reserve(points.size() * 30);
  for (const Vec3& p : points) append_xyz(out, p);
  return out;
}

std::string export_csv(std::span<const ExportStroke> strokes, bool include_smoothed) {
  if (strokes.empty()) fail(ErrorCode::kArgument, "nothing to export: session has no strokes");
  std::vector<const ExportStroke*> ordered;
  for (const ExportStroke& s : strokes) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ExportStroke* a, const ExportStroke* b) { return a->stroke_id < b->stroke_id; });
  std::string out(kStrokeCsvHeader);
  out += '\n';
  for (const ExportStroke* s : ordered) {
    append_rows(out, s->stroke_id, "raw", s->raw);
    if (include_smoothed) append_rows(out, s->stroke_id, "smoothed", s->smoothed);
    append_rows(out, s->stroke_id, "vector", s->vector);
  }
  return out;
}

std::vector<CsvRow> parse_stroke_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto parse_error = [&](const std::string& what) -> void {
    fail(ErrorCode::kParse, "csv line " + std::to_string(line_no) + ": " + what);
  };
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kStrokeCsvHeader) parse_error("unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) parse_error("expected 6 fields");
    CsvRow row;
    auto to_int = [&](std::string_view f, auto& out) {
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), out);
      if (ec != std::errc() || p != f.data() + f.size()) parse_error("bad integer");
    };
    auto to_double = [&](std::string_view f) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || p != f.data() + f.size()) parse_error("bad number");
      return v;
    };
    to_int(fields[0], row.stroke_id);
    row.kind = std::string(fields[1]);
    to_int(fields[2], row.point_index);
    row.position = Vec3(to_double(fields[3]), to_double(fields[4]), to_double(fields[5]));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace surfsketch::io
