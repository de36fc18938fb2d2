#include "surfsketch/spatial_index.hpp"

#include "surfsketch/error.hpp"

#include <algorithm>
#include <numeric>

namespace surfsketch {

SpatialIndex::SpatialIndex(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_ || mesh_->face_count() == 0) {
    fail(ErrorCode::kConstruction, "cannot index an empty mesh");
  }
  std::vector<FaceId> faces;
  std::vector<Vec3> centroids(mesh_->face_count());
  for (std::size_t f = 0; f < mesh_->face_count(); ++f) {
    const auto id = static_cast<FaceId>(f);
    const auto [a, b, c] = mesh_->triangle(id);
    centroids[f] = (a + b + c) / 3.0;
    if (!mesh_->degenerate(id)) faces.push_back(id);
  }
  if (faces.empty()) {
    fail(ErrorCode::kConstruction, "mesh has no non-degenerate faces");
  }
  nodes_.reserve(2 * faces.size());
  build(faces, centroids, 0, faces.size());
}

std::int32_t SpatialIndex::build(std::vector<FaceId>& faces, std::vector<Vec3>& centroids,
                                 std::size_t begin, std::size_t end) {
  const auto node_id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();

  Aabb box;
  Aabb centroid_box;
  for (std::size_t i = begin; i < end; ++i) {
    for (const Vec3& v : mesh_->triangle(faces[i])) box.extend(v);
    centroid_box.extend(centroids[faces[i]]);
  }
  nodes_[node_id].box = box;

  if (end - begin == 1) {
    nodes_[node_id].face = faces[begin];
    return node_id;
  }

  int axis = 0;
  const Vec3 extent = centroid_box.extent();
  if (extent[1] > extent[axis]) axis = 1;
  if (extent[2] > extent[axis]) axis = 2;

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(faces.begin() + begin, faces.begin() + mid, faces.begin() + end,
                   [&](FaceId l, FaceId r) {
                     const double cl = centroids[l][axis];
                     const double cr = centroids[r][axis];
                     return cl < cr || (cl == cr && l < r);
                   });

  build(faces, centroids, begin, mid);
  const std::int32_t right = build(faces, centroids, mid, end);
  nodes_[node_id].right = right;
  return node_id;
}

SurfacePoint SpatialIndex::closest_point(const Vec3& p) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  FaceId best_face = kNoFace;
  Vec3 best_bary = Vec3::Zero();

  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::int32_t id = stack[--top];
    const Node& node = nodes_[id];
    if (node.box.squared_distance(p) > best_d2) continue;
    if (node.right < 0) {
      const auto [a, b, c] = mesh_->triangle(node.face);
      const Vec3 bary = closest_point_barycentric(p, a, b, c);
      const Vec3 q = bary[0] * a + bary[1] * b + bary[2] * c;
      const double d2 = (q - p).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && node.face < best_face)) {
        best_d2 = d2;
        best_face = node.face;
        best_bary = bary;
      }
      continue;
    }
    const std::int32_t left = id + 1;
    const std::int32_t right = node.right;
    const double dl = nodes_[left].box.squared_distance(p);
    const double dr = nodes_[right].box.squared_distance(p);
    // Push the farther child first so the nearer one is expanded next.
    if (dl <= dr) {
      if (dr <= best_d2) stack[top++] = right;
      if (dl <= best_d2) stack[top++] = left;
    } else {
      if (dl <= best_d2) stack[top++] = left;
      if (dr <= best_d2) stack[top++] = right;
    }
  }
  return mesh_->point_on_face(best_face, best_bary);
}

std::optional<SurfacePoint> SpatialIndex::raycast(const Vec3& origin, const Vec3& dir) const {
  const double len = dir.norm();
  if (!(std::abs(len - 1.0) <= 1e-6)) {
    fail(ErrorCode::kArgument, "ray direction must be unit length, got |dir| = " +
                                   std::to_string(len));
  }
  const Vec3 inv_dir = dir.cwiseInverse();
  double best_t = std::numeric_limits<double>::infinity();
  FaceId best_face = kNoFace;
  Vec3 best_bary = Vec3::Zero();

  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const std::int32_t id = stack[--top];
    const Node& node = nodes_[id];
    const auto entry = node.box.ray_entry(origin, inv_dir, best_t);
    if (!entry) continue;
    if (node.right < 0) {
      const auto [a, b, c] = mesh_->triangle(node.face);
      if (auto hit = intersect_ray_triangle(origin, dir, a, b, c)) {
        if (hit->t < best_t || (hit->t == best_t && node.face < best_face)) {
          best_t = hit->t;
          best_face = node.face;
          best_bary = hit->barycentric;
        }
      }
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = id + 1;
  }
  if (best_face == kNoFace) return std::nullopt;
  return mesh_->point_on_face(best_face, best_bary);
}

std::size_t SpatialIndex::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.right < 0; }));
}

std::size_t SpatialIndex::indexed_face_count() const { return leaf_count(); }

bool SpatialIndex::validate() const {
  std::vector<int> seen(mesh_->face_count(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.right < 0) {
      if (n.face < 0 || static_cast<std::size_t>(n.face) >= seen.size()) return false;
      ++seen[n.face];
      for (const Vec3& v : mesh_->triangle(n.face)) {
        Aabb pt;
        pt.extend(v);
        if (!n.box.contains(pt)) return false;
      }
      continue;
    }
    if (!n.box.contains(nodes_[i + 1].box) || !n.box.contains(nodes_[n.right].box)) return false;
  }
  for (std::size_t f = 0; f < seen.size(); ++f) {
    const int expected = mesh_->degenerate(static_cast<FaceId>(f)) ? 0 : 1;
    if (seen[f] != expected) return false;
  }
  return true;
}

}  // namespace surfsketch
