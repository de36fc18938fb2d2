#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace surfsketch {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& o) {
    min = min.cwiseMin(o.min);
    max = max.cwiseMax(o.max);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  bool contains(const Aabb& o) const {
    return (min.array() <= o.min.array()).all() && (max.array() >= o.max.array()).all();
  }

  // Squared distance from p to the box (0 inside).
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (min - p).cwiseMax(Vec3::Zero()).cwiseMax(p - max);
    return d.squaredNorm();
  }

  // Slab test; returns entry distance if the ray hits within [0, t_max].
  std::optional<double> ray_entry(const Vec3& origin, const Vec3& inv_dir, double t_max) const;
};

// Closest point on triangle (a, b, c) to p, reported as barycentric weights
// (wa, wb, wc). Region-based solution; exact on edges and vertices.
Vec3 closest_point_barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct RayTriangleHit {
  double t;
  Vec3 barycentric;
};

// Moller-Trumbore intersection. Hits with t <= t_min are rejected.
std::optional<RayTriangleHit> intersect_ray_triangle(const Vec3& origin, const Vec3& dir,
                                                     const Vec3& a, const Vec3& b, const Vec3& c,
                                                     double t_min = 0.0);

inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

// Unsigned angle in radians between two vectors; 0 when either is zero.
inline double angle_between(const Vec3& u, const Vec3& v) {
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

// Closest point on segment [a, b] to p.
inline Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace surfsketch
