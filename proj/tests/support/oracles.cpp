#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace surfsketch::oracle {

namespace {

Vec3 closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double dd = d.dot(d);
  if (dd == 0.0) return a;
  double t = (p - a).dot(d) / dd;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return a + t * d;
}

// Solves for (s, t) in a + s (b - a) + t (c - a) closest to q via the 2x2
// normal equations.
bool barycentric_inside(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c, double* s_out = nullptr,
                        double* t_out = nullptr) {
  const Vec3 e1 = b - a, e2 = c - a, r = q - a;
  const double a11 = e1.dot(e1), a12 = e1.dot(e2), a22 = e2.dot(e2);
  const double det = a11 * a22 - a12 * a12;
  if (det <= 0.0) return false;
  const double b1 = r.dot(e1), b2 = r.dot(e2);
  const double s = (a22 * b1 - a12 * b2) / det;
  const double t = (a11 * b2 - a12 * b1) / det;
  if (s_out) *s_out = s;
  if (t_out) *t_out = t;
  return s >= 0.0 && t >= 0.0 && s + t <= 1.0;
}

}  // namespace

Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const Vec3 q = p - n * ((p - a).dot(n) / n.dot(n));
  if (barycentric_inside(q, a, b, c)) return q;
  Vec3 best = closest_on_segment(p, a, b);
  for (const Vec3& cand : {closest_on_segment(p, b, c), closest_on_segment(p, c, a)}) {
    if ((cand - p).norm() < (best - p).norm()) best = cand;
  }
  return best;
}

Nearest closest_point(const Mesh& mesh, const Vec3& p) {
  Nearest best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto id = static_cast<FaceId>(f);
    const auto tri = mesh.triangle(id);
    if ((tri[1] - tri[0]).cross(tri[2] - tri[0]).norm() * 0.5 < kDegenerateFaceArea) continue;
    const Vec3 q = closest_on_triangle(p, tri[0], tri[1], tri[2]);
    const double d = (q - p).norm();
    if (d < best.distance) best = {d, q, id};
  }
  return best;
}

std::optional<Nearest> raycast(const Mesh& mesh, const Vec3& origin, const Vec3& dir) {
  std::optional<Nearest> best;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto id = static_cast<FaceId>(f);
    const auto tri = mesh.triangle(id);
    const Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
    if (n.norm() * 0.5 < kDegenerateFaceArea) continue;
    const double denom = n.dot(dir);
    if (std::abs(denom) < 1e-15) continue;
    const double t = n.dot(tri[0] - origin) / denom;
    if (t <= 0.0) continue;
    const Vec3 hit = origin + t * dir;
    // Slightly tolerant inside test so grazing edge hits are not lost.
    double s = 0, u = 0;
    barycentric_inside(hit, tri[0], tri[1], tri[2], &s, &u);
    const double eps = 1e-12;
    if (s < -eps || u < -eps || s + u > 1.0 + eps) continue;
    if (!best || t < best->distance) best = Nearest{t, hit, id};
  }
  return best;
}

Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t) {
  // [t^3 t^2 t 1] * M * [p0 p1 p2 p3]^T / 2
  static constexpr double M[4][4] = {{-1, 3, -3, 1}, {2, -5, 4, -1}, {-1, 0, 1, 0}, {0, 2, 0, 0}};
  const double powers[4] = {t * t * t, t * t, t, 1.0};
  double w[4] = {0, 0, 0, 0};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) w[c] += powers[r] * M[r][c];
  }
  return 0.5 * (w[0] * p0 + w[1] * p1 + w[2] * p2 + w[3] * p3);
}

std::vector<double> turn_angles_deg(std::span<const Vec3> polyline) {
  std::vector<Vec3> tangents;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec3 t = polyline[i] - polyline[i - 1];
    if (t.norm() > 0.0) tangents.push_back(t);
  }
  std::vector<double> out;
  for (std::size_t i = 1; i < tangents.size(); ++i) {
    double c = tangents[i - 1].dot(tangents[i]) / (tangents[i - 1].norm() * tangents[i].norm());
    c = std::clamp(c, -1.0, 1.0);
    out.push_back(std::acos(c) * 180.0 / std::numbers::pi);
  }
  return out;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  return (closest_on_segment(p, a, b) - p).norm();
}

int painted_components(const TextureLayer& layer) {
  const int w = layer.width(), h = layer.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  int components = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (seen[y * w + x] || layer.at(x, y).a == 0) continue;
      ++components;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen[y * w + x] = 1;
      while (!q.empty()) {
        const auto [cx, cy] = q.front();
        q.pop();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (seen[ny * w + nx] || layer.at(nx, ny).a == 0) continue;
            seen[ny * w + nx] = 1;
            q.push({nx, ny});
          }
        }
      }
    }
  }
  return components;
}

int disc_texels(int width, int height, double cx, double cy, double r) {
  int n = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r * r) ++n;
    }
  }
  return n;
}

}  // namespace surfsketch::oracle
