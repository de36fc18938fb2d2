#include "surfsketch/metrics.hpp"

#include "surfsketch/error.hpp"
#include "surfsketch/io/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace surfsketch {
namespace {

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return n ? sum / n : 0.0; }
};

std::vector<Vec3> positions(std::span<const SurfacePoint> pts) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const SurfacePoint& p : pts) out.push_back(p.position);
  return out;
}

nlohmann::json angle_json(const AngleStats& s) {
  return {{"count", s.count}, {"mean_deg", s.mean_deg}, {"std_deg", s.std_deg}};
}

}  // namespace

AngleStats angle_stats(std::span<const Vec3> polyline) {
  if (polyline.size() < 3) {
    fail(ErrorCode::kInsufficientData, "angle statistics need at least 3 points, got " +
                                           std::to_string(polyline.size()));
  }
  std::vector<Vec3> tangents;
  tangents.reserve(polyline.size() - 1);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec3 t = polyline[i] - polyline[i - 1];
    if (t.squaredNorm() > 0.0) tangents.push_back(t);
  }
  std::vector<double> angles;
  for (std::size_t i = 1; i < tangents.size(); ++i) {
    angles.push_back(angle_between(tangents[i - 1], tangents[i]) * 180.0 / std::numbers::pi);
  }
  AngleStats stats;
  stats.count = angles.size();
  if (angles.empty()) return stats;
  double sum = 0.0;
  for (double a : angles) sum += a;
  stats.mean_deg = sum / angles.size();
  double var = 0.0;
  for (double a : angles) var += (a - stats.mean_deg) * (a - stats.mean_deg);
  stats.std_deg = std::sqrt(var / angles.size());
  return stats;
}

DeviationStats deviation_stats(std::span<const Vec3> raw, std::span<const Vec3> vector_polyline,
                               double mesh_diagonal) {
  if (raw.empty() || vector_polyline.empty()) {
    fail(ErrorCode::kInsufficientData, "deviation needs non-empty raw and vector geometry");
  }
  std::vector<double> distances;
  distances.reserve(raw.size());
  for (const Vec3& p : raw) {
    double best = (p - vector_polyline.front()).squaredNorm();
    for (std::size_t i = 1; i < vector_polyline.size(); ++i) {
      const Vec3 q = closest_point_on_segment(p, vector_polyline[i - 1], vector_polyline[i]);
      best = std::min(best, (p - q).squaredNorm());
    }
    distances.push_back(std::sqrt(best));
  }
  DeviationStats stats;
  double sum = 0.0;
  for (double d : distances) {
    sum += d;
    stats.max_m = std::max(stats.max_m, d);
  }
  stats.mean_m = sum / distances.size();
  double var = 0.0;
  for (double d : distances) var += (d - stats.mean_m) * (d - stats.mean_m);
  stats.std_m = std::sqrt(var / distances.size());
  stats.mean_pct_diagonal = mesh_diagonal > 0.0 ? 100.0 * stats.mean_m / mesh_diagonal : 0.0;
  return stats;
}

DeviationStats deviation_stats(const ProjectedStroke& raw, const VectorPath& vec, const Mesh& mesh) {
  const auto raw_pts = positions(raw.sample_points());
  return deviation_stats(raw_pts, vec.polyline(), mesh.diagonal());
}

SizeStats size_stats(std::span<const Vec3> raw, std::span<const Vec3> control_points) {
  if (raw.empty() || control_points.empty()) {
    fail(ErrorCode::kInsufficientData, "size comparison needs non-empty geometry");
  }
  SizeStats stats;
  stats.raw_points = raw.size();
  stats.vector_points = control_points.size();
  stats.raw_bytes = io::encode_points(raw).size();
  stats.vector_bytes = io::encode_points(control_points).size();
  stats.reduction_pct =
      100.0 * (1.0 - static_cast<double>(stats.vector_bytes) / static_cast<double>(stats.raw_bytes));
  return stats;
}

SizeStats size_stats(const ProjectedStroke& raw, const VectorPath& vec) {
  const auto raw_pts = positions(raw.sample_points());
  const auto ctrl = positions(vec.chain.points);
  return size_stats(raw_pts, ctrl);
}

MetricsReport build_report(std::span<const StrokeMetricsInput> strokes, double mesh_diagonal) {
  if (strokes.empty()) fail(ErrorCode::kEmptyReport, "no vectorized strokes to report");
  MetricsReport report;
  report.mesh_diagonal = mesh_diagonal;
  for (const StrokeMetricsInput& in : strokes) {
    StrokeMetrics m;
    m.task_id = in.task_id;
    m.stroke_id = in.stroke_id;
    if (in.raw.size() >= 3) m.angle_before = angle_stats(in.raw);
    if (in.vector_polyline.size() >= 3) m.angle_after = angle_stats(in.vector_polyline);
    if (!in.raw.empty()) {
      m.deviation = deviation_stats(in.raw, in.vector_polyline, mesh_diagonal);
      m.size = size_stats(in.raw, in.control_points);
    }
    report.strokes.push_back(std::move(m));
  }
  std::stable_sort(report.strokes.begin(), report.strokes.end(),
                   [](const StrokeMetrics& a, const StrokeMetrics& b) {
                     return std::tie(a.task_id, a.stroke_id) < std::tie(b.task_id, b.stroke_id);
                   });
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::json tasks = nlohmann::json::object();
  std::map<std::string, Mean> reduction_by_task;
  for (const StrokeMetrics& s : strokes) {
    nlohmann::json row = {
        {"stroke_id", s.stroke_id},
        {"angle_before", angle_json(s.angle_before)},
        {"angle_after", angle_json(s.angle_after)},
        {"deviation",
         {{"max_m", s.deviation.max_m},
          {"mean_m", s.deviation.mean_m},
          {"mean_pct_diagonal", s.deviation.mean_pct_diagonal},
          {"std_m", s.deviation.std_m}}},
        {"size",
         {{"raw_bytes", s.size.raw_bytes},
          {"raw_points", s.size.raw_points},
          {"reduction_pct", s.size.reduction_pct},
          {"vector_bytes", s.size.vector_bytes},
          {"vector_points", s.size.vector_points}}},
    };
    tasks[s.task_id]["strokes"].push_back(std::move(row));
    reduction_by_task[s.task_id].add(s.size.reduction_pct);
  }
  for (const auto& [task, moments] : reduction_by_task) {
    tasks[task]["stroke_count"] = moments.n;
    tasks[task]["mean_reduction_pct"] = moments.value();
  }
  const nlohmann::json doc = {
      {"format", "surfsketch-metrics"},
      {"version", 1},
      {"mesh_diagonal_m", mesh_diagonal},
      {"stroke_count", strokes.size()},
      {"tasks", std::move(tasks)},
  };
  return doc.dump(2) + "\n";
}

}  // namespace surfsketch
