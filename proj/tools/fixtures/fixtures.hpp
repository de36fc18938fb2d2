#pragma once

#include <surfsketch/io/trace.hpp>
#include <surfsketch/mesh.hpp>

#include <cstdint>
#include <functional>
#include <random>

namespace surfsketch::fixtures {

// Deterministic uniform noise: raw 64-bit draws converted by bit arithmetic
// so results do not depend on the standard library's distributions.
class Noise {
 public:
  explicit Noise(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double symmetric(double amplitude) { return amplitude * (2.0 * uniform() - 1.0); }
  // Random sign, magnitude uniform in [a/2, a].
  double signed_half(double amplitude) {
    const double sign = uniform() < 0.5 ? -1.0 : 1.0;
    return sign * amplitude * (0.5 + 0.5 * uniform());
  }

 private:
  std::mt19937_64 rng_;
};

// Regular grid over [x0, x1] x [y0, y1], two triangles per cell, with planar
// UVs spanning the unit square.
Mesh make_heightfield(int nx, int ny, double x0, double x1, double y0, double y1,
                      const std::function<double(double, double)>& height);

// Rock-like outcrop, 2 m x 1.16 m x 0.45 m.
struct Rock {
  static constexpr double kHalfX = 1.0;
  static constexpr double kHalfY = 0.58;
  static constexpr double kHeight = 0.45;

  explicit Rock(int nx = 288, int ny = 168);
  // Height of the triangulated surface's generating function, already
  // normalized to [0, kHeight] over the grid.
  double height(double x, double y) const;
  Mesh mesh() const;

  int nx;
  int ny;

 private:
  double raw(double x, double y) const;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

struct TraceStyle {
  double rate_hz = 180.0;
  double duration_s = 5.0;
  double hover_m = 0.25;     // hand height above the surface
  double heading_noise_deg = 0.0;  // per-step heading error bound
  double sway_m = 0.002;           // slow lateral hand sway amplitude
  double brush_radius = 0.01;
};

// Samples a planar curve c(s), s in [0, 1], as one pinched stroke hovering
// over the rock with downward rays.
RawStroke sample_stroke(const Rock& rock, const std::function<Vec2(double)>& curve,
                        const TraceStyle& style, Noise& noise, double t0_ms);

io::Trace task1_trace(const Rock& rock);  // open fault lines
io::Trace task2_trace(const Rock& rock);  // closed outlines
io::Trace rapid_trace(const Rock& rock);  // sparse fast strokes, gaps well above the brush radius

}  // namespace surfsketch::fixtures
