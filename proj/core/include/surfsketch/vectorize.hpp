#pragma once

#include "surfsketch/projection.hpp"
#include "surfsketch/spatial_index.hpp"

#include <optional>
#include <span>
#include <vector>

namespace surfsketch {

inline constexpr double kDefaultAngleToleranceDeg = 2.0;
inline constexpr int kDefaultSubdivisions = 1;

// Ordered control points of a vector line, each with the pointer ray it was
// drawn with. At least two points and no consecutive duplicates.
struct VectorChain {
  std::vector<SurfacePoint> points;
  std::vector<Vec3> rays;

  std::size_t size() const { return points.size(); }
};

// The run of smoothed vertices from control point k up to, but excluding,
// control point k + 1. `surface` is filled once the span is conformed.
struct PathSpan {
  std::vector<Vec3> points;
  std::vector<SurfacePoint> surface;
};

struct VectorPath {
  VectorChain chain;
  std::vector<PathSpan> spans;  // one per control-point pair
  int subdivisions = kDefaultSubdivisions;
  bool surface_conforming = false;
  // Chaikin output does not pass through interior control points.
  bool interpolating = true;

  // Smoothed polyline: all spans followed by the last control point.
  std::vector<Vec3> polyline() const;
  // Conformed polyline; only valid when surface_conforming.
  std::vector<SurfacePoint> surface_polyline() const;
};

// Uniform Catmull-Rom segment between p1 (t = 0) and p2 (t = 1).
Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t);

// Sample points of a stroke, deduplicated, with their rays. Throws
// kDegenerateStroke when fewer than two distinct points remain.
VectorChain to_chain(const ProjectedStroke& stroke, double mesh_diagonal);

// Drops interior points where the path turns by at most angle_tol_deg,
// front to back, repeated to a fixpoint. Endpoints are kept. A tolerance of
// zero disables merging.
VectorChain path_walk(const VectorChain& chain, double angle_tol_deg = kDefaultAngleToleranceDeg);

VectorPath smooth_catmull_rom(const VectorChain& chain, int subdivisions = kDefaultSubdivisions);

// Corner cutting at 1/4 and 3/4 with pinned endpoints; comparison baseline.
VectorPath smooth_chaikin(const VectorChain& chain, int iterations);

// Re-projects smoothed vertices and joins each consecutive pair with the
// plane section spanned by their chord and mean ray.
VectorPath conform_to_surface(const SpatialIndex& index, const VectorPath& path);

// Moves control point i to the surface point closest to new_pos and
// recomputes only the spans it influences.
VectorPath edit_control_point(const SpatialIndex& index, const VectorPath& path, std::size_t i,
                              const Vec3& new_pos);

// Tapline drawing: points placed one at a time. The draft holds a single
// pending point until the second one arrives and a path exists.
struct TaplineDraft {
  std::optional<SurfacePoint> pending;
  Vec3 pending_ray = Vec3(0.0, 0.0, -1.0);
  std::optional<VectorPath> path;

  bool empty() const { return !pending && !path; }
};

TaplineDraft tapline_append(const SpatialIndex& index, TaplineDraft draft, const SurfacePoint& sp,
                            const Vec3& ray, int subdivisions = kDefaultSubdivisions);

// Ray used for tapline points: into the surface along the face normal.
Vec3 inward_ray(const Mesh& mesh, const SurfacePoint& sp);

}  // namespace surfsketch
