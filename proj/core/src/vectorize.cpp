#include "surfsketch/vectorize.hpp"

#include "surfsketch/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace surfsketch {

std::vector<Vec3> VectorPath::polyline() const {
  std::vector<Vec3> out;
  for (const PathSpan& span : spans) out.insert(out.end(), span.points.begin(), span.points.end());
  if (!chain.points.empty()) out.push_back(chain.points.back().position);
  return out;
}

std::vector<SurfacePoint> VectorPath::surface_polyline() const {
  std::vector<SurfacePoint> out;
  for (const PathSpan& span : spans) out.insert(out.end(), span.surface.begin(), span.surface.end());
  if (!chain.points.empty()) out.push_back(chain.points.back());
  return out;
}

Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

VectorChain to_chain(const ProjectedStroke& stroke, double mesh_diagonal) {
  const double min_sep = 1e-6 * mesh_diagonal;
  VectorChain chain;
  for (const StrokePoint& p : stroke.points) {
    if (p.inserted()) continue;
    if (!chain.points.empty() &&
        (p.surface.position - chain.points.back().position).norm() <= min_sep) {
      continue;
    }
    chain.points.push_back(p.surface);
    chain.rays.push_back(p.ray_dir);
  }
  if (chain.points.size() < 2) {
    fail(ErrorCode::kDegenerateStroke, "stroke has " + std::to_string(chain.points.size()) +
                                           " distinct point(s); at least 2 are required");
  }
  return chain;
}

VectorChain path_walk(const VectorChain& chain, double angle_tol_deg) {
  if (angle_tol_deg < 0.0) fail(ErrorCode::kArgument, "angle tolerance must be non-negative");
  if (angle_tol_deg == 0.0 || chain.size() < 3) return chain;
  const double tol = angle_tol_deg * std::numbers::pi / 180.0;

  VectorChain current = chain;
  while (true) {
    VectorChain next;
    next.points.push_back(current.points.front());
    next.rays.push_back(current.rays.front());
    for (std::size_t i = 1; i + 1 < current.size(); ++i) {
      const Vec3 incoming = current.points[i].position - next.points.back().position;
      const Vec3 outgoing = current.points[i + 1].position - current.points[i].position;
      if (angle_between(incoming, outgoing) <= tol) continue;
      next.points.push_back(current.points[i]);
      next.rays.push_back(current.rays[i]);
    }
    next.points.push_back(current.points.back());
    next.rays.push_back(current.rays.back());
    const bool changed = next.size() != current.size();
    current = std::move(next);
    if (!changed) break;
  }
  return current;
}

namespace {

Vec3 mean_ray(const Vec3& a, const Vec3& b) {
  const Vec3 m = a + b;
  const double len = m.norm();
  return len > 1e-12 ? Vec3(m / len) : a;
}

void check_chain(const VectorChain& chain) {
  if (chain.points.size() < 2) {
    fail(ErrorCode::kDegenerateStroke, "vector chain needs at least 2 points");
  }
  if (chain.rays.size() != chain.points.size()) {
    fail(ErrorCode::kArgument, "vector chain rays do not match its points");
  }
}

PathSpan smooth_span(const VectorChain& chain, std::size_t k, int subdivisions) {
  const std::size_t n = chain.size();
  const Vec3& p0 = chain.points[k == 0 ? 0 : k - 1].position;
  const Vec3& p1 = chain.points[k].position;
  const Vec3& p2 = chain.points[k + 1].position;
  const Vec3& p3 = chain.points[std::min(k + 2, n - 1)].position;
  PathSpan span;
  span.points.reserve(subdivisions + 1);
  span.points.push_back(p1);
  for (int j = 1; j <= subdivisions; ++j) {
    const double t = static_cast<double>(j) / (subdivisions + 1);
    span.points.push_back(catmull_rom(p0, p1, p2, p3, t));
  }
  return span;
}

void append_section(const SpatialIndex& index, const SurfacePoint& a, const SurfacePoint& b,
                    const Vec3& ray, std::vector<SurfacePoint>& out) {
  out.push_back(a);
  const Vec3 chord = b.position - a.position;
  const double len = chord.norm();
  if (len == 0.0) return;
  const Vec3 normal = chord.cross(ray);
  if (normal.norm() > 1e-9 * len) {
    try {
      const SurfacePolyline section = plane_cut_path(index, a, b, normal.normalized());
      for (std::size_t i = 1; i + 1 < section.points.size(); ++i) out.push_back(section.points[i]);
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPathNotFound) throw;
    }
  }
  // Fallback: closest points of a chord subdivision at roughly edge spacing.
  const double spacing = std::max(index.mesh().max_edge_length(), 1e-9);
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  for (int k = 1; k < pieces; ++k) {
    const double t = static_cast<double>(k) / pieces;
    out.push_back(index.closest_point(a.position + t * chord));
  }
}

void conform_span(const SpatialIndex& index, const VectorChain& chain, std::size_t k,
                  PathSpan& span) {
  const Vec3 interior_ray = mean_ray(chain.rays[k], chain.rays[k + 1]);
  std::vector<SurfacePoint> anchors;
  std::vector<Vec3> rays;
  anchors.push_back(chain.points[k]);
  rays.push_back(chain.rays[k]);
  for (std::size_t j = 1; j < span.points.size(); ++j) {
    anchors.push_back(index.closest_point(span.points[j]));
    rays.push_back(interior_ray);
  }
  anchors.push_back(chain.points[k + 1]);
  rays.push_back(chain.rays[k + 1]);

  std::vector<SurfacePoint> out;
  for (std::size_t j = 0; j + 1 < anchors.size(); ++j) {
    append_section(index, anchors[j], anchors[j + 1], mean_ray(rays[j], rays[j + 1]), out);
  }
  // Remove zero-length segments, including one closing onto the next control point.
  std::vector<SurfacePoint> cleaned;
  cleaned.reserve(out.size());
  for (const SurfacePoint& p : out) {
    if (!cleaned.empty() && (p.position - cleaned.back().position).squaredNorm() == 0.0) continue;
    cleaned.push_back(p);
  }
  while (cleaned.size() > 1 &&
         (cleaned.back().position - chain.points[k + 1].position).squaredNorm() == 0.0) {
    cleaned.pop_back();
  }
  span.surface = std::move(cleaned);
  span.points.clear();
  span.points.reserve(span.surface.size());
  for (const SurfacePoint& p : span.surface) span.points.push_back(p.position);
}

// Recomputes spans [first, last] (clamped) from the chain.
void rebuild_spans(const SpatialIndex* index, VectorPath& path, std::ptrdiff_t first,
                   std::ptrdiff_t last) {
  const auto span_count = static_cast<std::ptrdiff_t>(path.chain.size()) - 1;
  path.spans.resize(static_cast<std::size_t>(span_count));
  first = std::max<std::ptrdiff_t>(first, 0);
  last = std::min(last, span_count - 1);
  for (std::ptrdiff_t k = first; k <= last; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    path.spans[idx] = smooth_span(path.chain, idx, path.subdivisions);
    if (path.surface_conforming) conform_span(*index, path.chain, idx, path.spans[idx]);
  }
}

}  // namespace

VectorPath smooth_catmull_rom(const VectorChain& chain, int subdivisions) {
  check_chain(chain);
  if (subdivisions < 0) fail(ErrorCode::kArgument, "subdivisions must be non-negative");
  VectorPath path;
  path.chain = chain;
  path.subdivisions = subdivisions;
  rebuild_spans(nullptr, path, 0, static_cast<std::ptrdiff_t>(chain.size()));
  return path;
}

VectorPath smooth_chaikin(const VectorChain& chain, int iterations) {
  check_chain(chain);
  if (iterations < 1) fail(ErrorCode::kArgument, "chaikin needs at least one iteration");
  std::vector<Vec3> pts;
  for (const SurfacePoint& p : chain.points) pts.push_back(p.position);
  for (int it = 0; it < iterations; ++it) {
    std::vector<Vec3> next;
    next.reserve(pts.size() * 2);
    next.push_back(pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      next.push_back(0.75 * pts[i] + 0.25 * pts[i + 1]);
      next.push_back(0.25 * pts[i] + 0.75 * pts[i + 1]);
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  VectorPath path;
  path.chain = chain;
  path.subdivisions = 0;
  path.interpolating = false;
  pts.pop_back();
  path.spans.push_back(PathSpan{std::move(pts), {}});
  return path;
}

VectorPath conform_to_surface(const SpatialIndex& index, const VectorPath& path) {
  if (!path.interpolating) {
    fail(ErrorCode::kArgument, "only interpolating paths can be conformed");
  }
  check_chain(path.chain);
  VectorPath out = path;
  out.surface_conforming = true;
  rebuild_spans(&index, out, 0, static_cast<std::ptrdiff_t>(out.chain.size()));
  return out;
}

VectorPath edit_control_point(const SpatialIndex& index, const VectorPath& path, std::size_t i,
                              const Vec3& new_pos) {
  if (i >= path.chain.size()) {
    fail(ErrorCode::kArgument, "control point " + std::to_string(i) + " out of range (" +
                                   std::to_string(path.chain.size()) + " points)");
  }
  if (!path.interpolating) fail(ErrorCode::kArgument, "path is not editable");
  VectorPath out = path;
  const SurfacePoint moved = index.closest_point(new_pos);
  const double min_sep = 1e-6 * index.mesh().diagonal();
  for (std::size_t nb : {i - 1, i + 1}) {
    if (nb < out.chain.size() && (out.chain.points[nb].position - moved.position).norm() <= min_sep) {
      fail(ErrorCode::kArgument, "edit would merge control points " + std::to_string(i) + " and " +
                                     std::to_string(nb));
    }
  }
  out.chain.points[i] = moved;
  const auto k = static_cast<std::ptrdiff_t>(i);
  rebuild_spans(out.surface_conforming ? &index : nullptr, out, k - 2, k + 1);
  return out;
}

TaplineDraft tapline_append(const SpatialIndex& index, TaplineDraft draft, const SurfacePoint& sp,
                            const Vec3& ray, int subdivisions) {
  const double min_sep = 1e-6 * index.mesh().diagonal();
  if (draft.empty()) {
    draft.pending = sp;
    draft.pending_ray = ray;
    return draft;
  }
  if (!draft.path) {
    if ((draft.pending->position - sp.position).norm() <= min_sep) return draft;
    VectorChain chain;
    chain.points = {*draft.pending, sp};
    chain.rays = {draft.pending_ray, ray};
    draft.path = conform_to_surface(index, smooth_catmull_rom(chain, subdivisions));
    draft.pending.reset();
    return draft;
  }
  VectorPath& path = *draft.path;
  if ((path.chain.points.back().position - sp.position).norm() <= min_sep) return draft;
  path.chain.points.push_back(sp);
  path.chain.rays.push_back(ray);
  const auto n = static_cast<std::ptrdiff_t>(path.chain.size());
  rebuild_spans(path.surface_conforming ? &index : nullptr, path, n - 3, n - 2);
  return draft;
}

Vec3 inward_ray(const Mesh& mesh, const SurfacePoint& sp) {
  const Vec3 n = mesh.normal(sp.face);
  return n.squaredNorm() > 0.0 ? Vec3(-n) : Vec3(0.0, 0.0, -1.0);
}

}  // namespace surfsketch
