#pragma once

#include "surfsketch/mesh.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace surfsketch {

// Bounding-volume hierarchy over the non-degenerate faces of a mesh.
//
// Nodes are stored depth-first in a flat array; an inner node's left child
// immediately follows it and `right` points at the second child. Each leaf
// holds exactly one face, so query results coincide with an exhaustive
// search, including the lowest-face-id tie break.
//
// The index is immutable once built and may be queried concurrently.
class SpatialIndex {
 public:
  explicit SpatialIndex(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  SurfacePoint closest_point(const Vec3& p) const;

  // `dir` must be unit length within 1e-6.
  std::optional<SurfacePoint> raycast(const Vec3& origin, const Vec3& dir) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t indexed_face_count() const;

  // Structural self-check: every indexed face in one leaf, parents enclose children.
  bool validate() const;

 private:
  struct Node {
    Aabb box;
    std::int32_t right = -1;  // -1 marks a leaf
    FaceId face = kNoFace;
  };

  std::int32_t build(std::vector<FaceId>& faces, std::vector<Vec3>& centroids, std::size_t begin,
                     std::size_t end);

  std::shared_ptr<const Mesh> mesh_;
  std::vector<Node> nodes_;
};

// Plane-section path between two surface points.
//
// Walks the faces crossed by the plane through `a` with normal
// `plane_normal`, starting at a's face and following edge adjacency in both
// directions until b is reached. The shorter successful direction wins.
// Interior points lie on crossed mesh edges. Throws kPathNotFound when no
// adjacency-connected piece of the section joins a to b.
SurfacePolyline plane_cut_path(const SpatialIndex& index, const SurfacePoint& a,
                               const SurfacePoint& b, const Vec3& plane_normal);

}  // namespace surfsketch
