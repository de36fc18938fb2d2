#include "surfsketch/error.hpp"
#include "surfsketch/spatial_index.hpp"

#include <algorithm>
#include <string>

namespace surfsketch {
namespace {

class SectionWalker {
 public:
  SectionWalker(const Mesh& mesh, const Vec3& origin, const Vec3& normal)
      : mesh_(mesh), origin_(origin), normal_(normal) {}

  double side(std::uint32_t vertex) const {
    return normal_.dot(mesh_.vertices()[vertex] - origin_);
  }

  // Vertices exactly on the plane count as positive. Classification depends
  // only on the vertex, so neighbors agree on which shared edges are crossed
  // and every face is crossed on exactly zero or two edges.
  bool positive(std::uint32_t vertex) const { return side(vertex) >= 0.0; }

  bool crossed(FaceId f, int edge) const {
    const Face& face = mesh_.faces()[f];
    return positive(face[edge]) != positive(face[(edge + 1) % 3]);
  }

  int other_crossed_edge(FaceId f, int entry_edge) const {
    for (int e = 0; e < 3; ++e) {
      if (e != entry_edge && crossed(f, e)) return e;
    }
    return -1;
  }

  SurfacePoint crossing(FaceId f, int edge) const {
    const Face& face = mesh_.faces()[f];
    const int i = edge;
    const int j = (edge + 1) % 3;
    const double si = side(face[i]);
    const double sj = side(face[j]);
    const double t = si / (si - sj);
    Vec3 bary = Vec3::Zero();
    bary[i] = 1.0 - t;
    bary[j] = t;
    return mesh_.point_on_face(f, bary);
  }

 private:
  const Mesh& mesh_;
  Vec3 origin_;
  Vec3 normal_;
};

bool face_contains(const Mesh& mesh, FaceId f, const SurfacePoint& p, double tol) {
  return f == p.face || mesh.distance_to_face(f, p.position) <= tol;
}

// Faces touching p: its own face plus, when p sits on an edge or vertex, the
// faces around it reachable through adjacency.
std::vector<FaceId> incident_faces(const Mesh& mesh, const SurfacePoint& p, double tol) {
  std::vector<FaceId> out{p.face};
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (int e = 0; e < 3; ++e) {
      const FaceId g = mesh.neighbor(out[k], e);
      if (g == kNoFace || std::find(out.begin(), out.end(), g) != out.end()) continue;
      if (mesh.distance_to_face(g, p.position) <= tol) out.push_back(g);
    }
  }
  return out;
}

void drop_zero_length(std::vector<SurfacePoint>& pts) {
  std::vector<SurfacePoint> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool last = i + 1 == pts.size();
    if (!out.empty() && (pts[i].position - out.back().position).squaredNorm() == 0.0) {
      // Keep the endpoint itself rather than an edge crossing that coincides with it.
      if (last && out.size() > 1) out.back() = pts[i];
      continue;
    }
    out.push_back(pts[i]);
  }
  pts = std::move(out);
}

}  // namespace

SurfacePolyline plane_cut_path(const SpatialIndex& index, const SurfacePoint& a,
                               const SurfacePoint& b, const Vec3& plane_normal) {
  const Mesh& mesh = index.mesh();
  const double normal_len = plane_normal.norm();
  if (!(normal_len > 1e-12)) fail(ErrorCode::kArgument, "plane normal must be non-zero");
  const Vec3 normal = plane_normal / normal_len;

  const Vec3 chord = b.position - a.position;
  const double chord_len = chord.norm();
  if (chord_len > 0.0 && std::abs(normal.dot(chord)) > 1e-4 * chord_len) {
    fail(ErrorCode::kArgument, "plane does not contain both endpoints");
  }
  if (a.face < 0 || static_cast<std::size_t>(a.face) >= mesh.face_count() || b.face < 0 ||
      static_cast<std::size_t>(b.face) >= mesh.face_count()) {
    fail(ErrorCode::kArgument, "endpoints must reference mesh faces");
  }

  const double tol = 1e-9 * std::max(mesh.diagonal(), 1.0);
  SurfacePolyline result;
  if (face_contains(mesh, a.face, b, tol)) {
    result.points.push_back(a);
    if (chord_len > 0.0) result.points.push_back(b);
    return result;
  }
  if (mesh.degenerate(a.face)) {
    fail(ErrorCode::kPathNotFound, "start face " + std::to_string(a.face) + " is degenerate");
  }

  const SectionWalker walker(mesh, a.position, normal);
  std::vector<SurfacePoint> best;
  double best_length = std::numeric_limits<double>::infinity();

  // A start on an edge or vertex may only graze a.face, so the walk can
  // leave through any face around it.
  for (const FaceId start : incident_faces(mesh, a, tol)) {
    for (int exit_edge = 0; exit_edge < 3; ++exit_edge) {
      if (!walker.crossed(start, exit_edge)) continue;
      std::vector<SurfacePoint> pts{a};
      FaceId f = start;
      int e = exit_edge;
      bool reached = false;
      for (std::size_t steps = 0; steps <= mesh.face_count(); ++steps) {
        pts.push_back(walker.crossing(f, e));
        const FaceId g = mesh.neighbor(f, e);
        if (g == kNoFace || g == start) break;
        if (face_contains(mesh, g, b, tol)) {
          pts.push_back(b);
          reached = true;
          break;
        }
        const int next = walker.other_crossed_edge(g, mesh.shared_edge(g, f));
        if (next < 0) break;
        f = g;
        e = next;
      }
      if (!reached) continue;
      drop_zero_length(pts);
      double length = 0.0;
      for (std::size_t i = 1; i < pts.size(); ++i) length += (pts[i].position - pts[i - 1].position).norm();
      if (length < best_length) {
        best_length = length;
        best = std::move(pts);
      }
    }
  }

  if (best.empty()) {
    fail(ErrorCode::kPathNotFound, "plane section from face " + std::to_string(a.face) +
                                       " does not reach face " + std::to_string(b.face));
  }
  result.points = std::move(best);
  return result;
}

}  // namespace surfsketch
