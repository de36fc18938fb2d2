#include "surfsketch/mesh.hpp"

#include "surfsketch/error.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace surfsketch {

double SurfacePolyline::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += (points[i].position - points[i - 1].position).norm();
  }
  if (closed && points.size() > 2) {
    total += (points.front().position - points.back().position).norm();
  }
  return total;
}

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces,
           std::vector<std::optional<FaceUv>> uvs)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), uvs_(std::move(uvs)) {
  if (uvs_.empty()) uvs_.resize(faces_.size());
  if (uvs_.size() != faces_.size()) {
    fail(ErrorCode::kConstruction, "uv table has " + std::to_string(uvs_.size()) +
                                       " entries for " + std::to_string(faces_.size()) + " faces");
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    for (std::uint32_t v : faces_[f]) {
      if (v >= vertices_.size()) {
        fail(ErrorCode::kConstruction, "face " + std::to_string(f) + " references vertex " +
                                           std::to_string(v) + " of " +
                                           std::to_string(vertices_.size()));
      }
    }
  }
  for (const Vec3& v : vertices_) bounds_.extend(v);

  degenerate_.resize(faces_.size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto [a, b, c] = triangle(static_cast<FaceId>(f));
    degenerate_[f] = triangle_area(a, b, c) < kDegenerateFaceArea ? 1 : 0;
    max_edge_length_ = std::max({max_edge_length_, (b - a).norm(), (c - b).norm(), (a - c).norm()});
  }

  // Undirected edge -> incident (face, edge) pairs. Only edges with exactly
  // two non-degenerate incident faces become adjacency links, which keeps the
  // relation symmetric.
  struct Incidence {
    FaceId face[2] = {kNoFace, kNoFace};
    int edge[2] = {-1, -1};
    int count = 0;
  };
  std::unordered_map<std::uint64_t, Incidence> edges;
  edges.reserve(faces_.size() * 2);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (degenerate_[f]) continue;
    for (int e = 0; e < 3; ++e) {
      std::uint64_t u = faces_[f][e];
      std::uint64_t v = faces_[f][(e + 1) % 3];
      if (u > v) std::swap(u, v);
      Incidence& inc = edges[(u << 32) | v];
      if (inc.count < 2) {
        inc.face[inc.count] = static_cast<FaceId>(f);
        inc.edge[inc.count] = e;
      }
      ++inc.count;
    }
  }
  adjacency_.assign(faces_.size(), {kNoFace, kNoFace, kNoFace});
  for (const auto& [key, inc] : edges) {
    if (inc.count != 2) continue;
    adjacency_[inc.face[0]][inc.edge[0]] = inc.face[1];
    adjacency_[inc.face[1]][inc.edge[1]] = inc.face[0];
  }
}

std::array<Vec3, 3> Mesh::triangle(FaceId f) const {
  const Face& face = faces_[f];
  return {vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]};
}

bool Mesh::has_any_uv() const {
  return std::any_of(uvs_.begin(), uvs_.end(), [](const auto& uv) { return uv.has_value(); });
}

int Mesh::shared_edge(FaceId f, FaceId g) const {
  for (int e = 0; e < 3; ++e) {
    if (adjacency_[f][e] == g) return e;
  }
  return -1;
}

bool Mesh::uv_continuous(FaceId f, FaceId g) const {
  if (f == g) return has_uv(f);
  const int ef = shared_edge(f, g);
  if (ef < 0 || !has_uv(f) || !has_uv(g)) return false;
  const int eg = shared_edge(g, f);
  // Shared edge runs (u, v) in f and (v, u) in g for consistently oriented
  // meshes; compare by vertex id so orientation does not matter.
  for (int k = 0; k < 2; ++k) {
    const int cf = (ef + k) % 3;
    const std::uint32_t vid = faces_[f][cf];
    int cg = -1;
    for (int j = 0; j < 2; ++j) {
      if (faces_[g][(eg + j) % 3] == vid) cg = (eg + j) % 3;
    }
    if (cg < 0) return false;
    if (((*uvs_[f])[cf] - (*uvs_[g])[cg]).squaredNorm() > 1e-18) return false;
  }
  return true;
}

double Mesh::area(FaceId f) const {
  const auto [a, b, c] = triangle(f);
  return triangle_area(a, b, c);
}

Vec3 Mesh::normal(FaceId f) const {
  const auto [a, b, c] = triangle(f);
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

SurfacePoint Mesh::point_on_face(FaceId f, const Vec3& barycentric) const {
  const auto [a, b, c] = triangle(f);
  SurfacePoint sp;
  sp.face = f;
  sp.barycentric = barycentric;
  sp.position = barycentric[0] * a + barycentric[1] * b + barycentric[2] * c;
  if (has_uv(f)) {
    const FaceUv& t = *uvs_[f];
    sp.uv = barycentric[0] * t[0] + barycentric[1] * t[1] + barycentric[2] * t[2];
  }
  return sp;
}

SurfacePoint Mesh::project_to_face(FaceId f, const Vec3& p) const {
  const auto [a, b, c] = triangle(f);
  return point_on_face(f, closest_point_barycentric(p, a, b, c));
}

double Mesh::distance_to_face(FaceId f, const Vec3& p) const {
  return (project_to_face(f, p).position - p).norm();
}

}  // namespace surfsketch
