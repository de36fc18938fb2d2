#pragma once

#include "surfsketch/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace surfsketch {

using FaceId = std::int32_t;
inline constexpr FaceId kNoFace = -1;

// Faces with area below this (m^2) are treated as slivers: they are kept in
// the mesh but skipped by the spatial index and by adjacency walks.
inline constexpr double kDegenerateFaceArea = 1e-12;

using Face = std::array<std::uint32_t, 3>;
using FaceUv = std::array<Vec2, 3>;

// A point on the mesh surface. position and uv are always the barycentric
// combination of the face's corners.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  FaceId face = kNoFace;
  Vec3 barycentric = Vec3(1.0, 0.0, 0.0);
  Vec2 uv = Vec2::Zero();
};

struct SurfacePolyline {
  std::vector<SurfacePoint> points;
  bool closed = false;

  double length() const;
};

// Immutable triangle mesh with optional per-corner UVs and edge adjacency.
// Edge k of a face joins corner k to corner (k + 1) % 3.
class Mesh {
 public:
  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
       std::vector<std::optional<FaceUv>> uvs = {});

  std::span<const Vec3> vertices() const { return vertices_; }
  std::span<const Face> faces() const { return faces_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  std::array<Vec3, 3> triangle(FaceId f) const;
  bool has_uv(FaceId f) const { return uvs_[f].has_value(); }
  bool has_any_uv() const;
  const FaceUv& uv(FaceId f) const { return *uvs_[f]; }

  // Neighbor across edge k, or kNoFace on boundary / non-manifold / sliver edges.
  FaceId neighbor(FaceId f, int edge) const { return adjacency_[f][edge]; }
  // Edge index of `f` that borders `g`, or -1.
  int shared_edge(FaceId f, FaceId g) const;
  // True when both faces carry UVs that agree at their shared edge.
  bool uv_continuous(FaceId f, FaceId g) const;

  bool degenerate(FaceId f) const { return degenerate_[f] != 0; }
  double area(FaceId f) const;
  Vec3 normal(FaceId f) const;

  const Aabb& bounds() const { return bounds_; }
  double diagonal() const { return bounds_.empty() ? 0.0 : bounds_.extent().norm(); }
  double max_edge_length() const { return max_edge_length_; }

  SurfacePoint point_on_face(FaceId f, const Vec3& barycentric) const;
  // Closest point to p restricted to face f.
  SurfacePoint project_to_face(FaceId f, const Vec3& p) const;
  double distance_to_face(FaceId f, const Vec3& p) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<std::optional<FaceUv>> uvs_;
  std::vector<std::array<FaceId, 3>> adjacency_;
  std::vector<std::uint8_t> degenerate_;
  Aabb bounds_;
  double max_edge_length_ = 0.0;
};

}  // namespace surfsketch
