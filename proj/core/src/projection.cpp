#include "surfsketch/projection.hpp"

#include "surfsketch/error.hpp"

#include <cmath>
#include <string>

namespace surfsketch {

std::vector<SurfacePoint> ProjectedStroke::sample_points() const {
  std::vector<SurfacePoint> out;
  out.reserve(points.size());
  for (const StrokePoint& p : points) {
    if (!p.inserted()) out.push_back(p.surface);
  }
  return out;
}

void validate_stroke(const RawStroke& stroke) {
  if (stroke.samples.empty()) fail(ErrorCode::kArgument, "stroke has no samples");
  if (!(stroke.brush_radius > 0.0)) fail(ErrorCode::kArgument, "brush radius must be positive");
  for (std::size_t i = 0; i < stroke.samples.size(); ++i) {
    const HandSample& s = stroke.samples[i];
    if (!(std::abs(s.ray_dir.norm() - 1.0) <= 1e-6)) {
      fail(ErrorCode::kValidation, "sample " + std::to_string(i) + " ray is not unit length");
    }
    if (i > 0 && s.t_ms < stroke.samples[i - 1].t_ms) {
      fail(ErrorCode::kValidation, "sample " + std::to_string(i) + " timestamp decreases");
    }
  }
}

std::optional<StrokePoint> MimicryProjector::add(const HandSample& sample,
                                                 std::int32_t source_index) {
  StrokePoint out;
  out.ray_dir = sample.ray_dir;
  out.source_index = source_index;
  if (!last_) {
    auto hit = index_->raycast(sample.position, sample.ray_dir);
    out.surface = hit ? *hit : index_->closest_point(sample.position);
  } else {
    const Vec3 delta = sample.position - last_->hand;
    if (delta.norm() < kSampleDedupDistance) return std::nullopt;
    out.surface = index_->closest_point(last_->surface + delta);
  }
  last_ = Anchor{sample.position, out.surface.position};
  return out;
}

ProjectedStroke project_mimicry(const SpatialIndex& index, const RawStroke& stroke) {
  validate_stroke(stroke);
  ProjectedStroke out;
  out.brush_radius = stroke.brush_radius;
  out.color = stroke.color;
  out.points.reserve(stroke.samples.size());
  MimicryProjector projector(index);
  for (std::size_t i = 0; i < stroke.samples.size(); ++i) {
    if (auto p = projector.add(stroke.samples[i], static_cast<std::int32_t>(i))) {
      out.points.push_back(*p);
    }
  }
  return out;
}

ProjectedStroke project_spraycan(const SpatialIndex& index, const RawStroke& stroke) {
  validate_stroke(stroke);
  ProjectedStroke out;
  out.brush_radius = stroke.brush_radius;
  out.color = stroke.color;
  out.points.reserve(stroke.samples.size());
  const Vec3* last_hand = nullptr;
  for (std::size_t i = 0; i < stroke.samples.size(); ++i) {
    const HandSample& s = stroke.samples[i];
    if (last_hand && (s.position - *last_hand).norm() < kSampleDedupDistance) continue;
    last_hand = &s.position;
    StrokePoint p;
    p.ray_dir = s.ray_dir;
    p.source_index = static_cast<std::int32_t>(i);
    auto hit = index.raycast(s.position, s.ray_dir);
    p.surface = hit ? *hit : index.closest_point(s.position);
    out.points.push_back(p);
  }
  return out;
}

namespace {

Vec3 mean_ray(const Vec3& a, const Vec3& b) {
  const Vec3 m = a + b;
  const double len = m.norm();
  return len > 1e-12 ? Vec3(m / len) : a;
}

void bisect(const SpatialIndex& index, const SurfacePoint& a, const SurfacePoint& b,
            const Vec3& ray, double max_gap, int depth, std::vector<StrokePoint>& out) {
  if ((b.position - a.position).norm() <= max_gap || depth == 0) return;
  StrokePoint mid;
  mid.surface = index.closest_point(0.5 * (a.position + b.position));
  mid.ray_dir = ray;
  bisect(index, a, mid.surface, ray, max_gap, depth - 1, out);
  out.push_back(mid);
  bisect(index, mid.surface, b, ray, max_gap, depth - 1, out);
}

constexpr int kMaxBisectionDepth = 24;

}  // namespace

std::vector<StrokePoint> bridge_segment(const SpatialIndex& index, const StrokePoint& a,
                                        const StrokePoint& b, double max_gap) {
  std::vector<StrokePoint> out;
  const Vec3 chord = b.surface.position - a.surface.position;
  const double gap = chord.norm();
  if (gap <= max_gap) return out;

  const Vec3 ray = mean_ray(a.ray_dir, b.ray_dir);
  const Vec3 normal = chord.cross(ray);
  std::optional<SurfacePolyline> section;
  if (normal.norm() > 1e-9 * gap) {
    try {
      section = plane_cut_path(index, a.surface, b.surface, normal.normalized());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPathNotFound && e.code() != ErrorCode::kArgument) throw;
    }
  }
  if (!section) {
    bisect(index, a.surface, b.surface, ray, max_gap, kMaxBisectionDepth, out);
    return out;
  }

  const Mesh& mesh = index.mesh();
  const auto& pts = section->points;
  for (std::size_t m = 0; m + 1 < pts.size(); ++m) {
    const SurfacePoint& from = pts[m];
    const SurfacePoint& to = pts[m + 1];
    if (m > 0) {
      StrokePoint p;
      p.surface = from;
      p.ray_dir = ray;
      out.push_back(p);
    }
    const double len = (to.position - from.position).norm();
    if (len <= max_gap) continue;
    const int pieces = static_cast<int>(std::floor(len / max_gap)) + 1;
    for (int k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      const Vec3 pos = (1.0 - t) * from.position + t * to.position;
      StrokePoint p;
      p.surface = mesh.project_to_face(to.face, pos);
      p.ray_dir = ray;
      out.push_back(p);
    }
  }

  // Projection onto a face can shift a sample when the section passed
  // through a vertex; repair any gap that ended up too wide.
  std::vector<StrokePoint> repaired;
  repaired.reserve(out.size());
  SurfacePoint prev = a.surface;
  for (std::size_t i = 0; i <= out.size(); ++i) {
    const SurfacePoint& next = i < out.size() ? out[i].surface : b.surface;
    bisect(index, prev, next, ray, max_gap, kMaxBisectionDepth, repaired);
    if (i < out.size()) {
      repaired.push_back(out[i]);
      prev = out[i].surface;
    }
  }
  return repaired;
}

ProjectedStroke bridge_gaps(const SpatialIndex& index, const ProjectedStroke& stroke) {
  ProjectedStroke out;
  out.brush_radius = stroke.brush_radius;
  out.color = stroke.color;
  out.densified = true;
  out.points.reserve(stroke.points.size());
  for (std::size_t i = 0; i < stroke.points.size(); ++i) {
    if (i > 0) {
      auto fill = bridge_segment(index, stroke.points[i - 1], stroke.points[i], stroke.brush_radius);
      out.points.insert(out.points.end(), fill.begin(), fill.end());
    }
    out.points.push_back(stroke.points[i]);
  }
  return out;
}

}  // namespace surfsketch
