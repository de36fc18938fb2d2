#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace surfsketch::fixtures {

using std::numbers::pi;

Mesh make_heightfield(int nx, int ny, double x0, double x1, double y0, double y1,
                      const std::function<double(double, double)>& height) {
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  std::vector<Vec2> uvs;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double u = static_cast<double>(i) / nx;
      const double v = static_cast<double>(j) / ny;
      const double x = x0 + u * (x1 - x0);
      const double y = y0 + v * (y1 - y0);
      vertices.emplace_back(x, y, height(x, y));
      uvs.emplace_back(u, v);
    }
  }
  std::vector<Face> faces;
  std::vector<std::optional<FaceUv>> face_uvs;
  const auto at = [&](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::uint32_t a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
      for (const Face& f : {Face{a, b, c}, Face{a, c, d}}) {
        faces.push_back(f);
        face_uvs.push_back(FaceUv{uvs[f[0]], uvs[f[1]], uvs[f[2]]});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(faces), std::move(face_uvs));
}

Rock::Rock(int nx_, int ny_) : nx(nx_), ny(ny_) {
  double lo = INFINITY, hi = -INFINITY;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = -kHalfX + 2.0 * kHalfX * i / nx;
      const double y = -kHalfY + 2.0 * kHalfY * j / ny;
      const double h = raw(x, y);
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
  }
  lo_ = lo;
  hi_ = hi;
}

double Rock::raw(double x, double y) const {
  // A broad dome with a low ridge, a shoulder and some gentle weathering.
  const double dome = std::exp(-(x * x / 0.7 + y * y / 0.3));
  const double ridge = 0.25 * std::exp(-std::pow(y - 0.2 * std::sin(1.6 * x), 2) / 0.09) *
                       (0.7 + 0.3 * std::cos(1.1 * x));
  const double shoulder = 0.2 * std::exp(-((x + 0.55) * (x + 0.55) + (y + 0.3) * (y + 0.3)) / 0.12);
  const double weathering = 0.015 * std::sin(3.0 * x + 1.0) * std::cos(2.5 * y - 0.5);
  return dome + ridge + shoulder + weathering;
}

double Rock::height(double x, double y) const { return kHeight * (raw(x, y) - lo_) / (hi_ - lo_); }

Mesh Rock::mesh() const {
  return make_heightfield(nx, ny, -kHalfX, kHalfX, -kHalfY, kHalfY,
                          [this](double x, double y) { return height(x, y); });
}

RawStroke sample_stroke(const Rock& rock, const std::function<Vec2(double)>& curve,
                        const TraceStyle& style, Noise& noise, double t0_ms) {
  RawStroke stroke;
  stroke.brush_radius = style.brush_radius;
  const int n = static_cast<int>(std::lround(style.rate_hz * style.duration_s));
  // Each step of the planned curve is traced with a small random heading
  // error, plus a slow lateral sway of the hand.
  const double phase = 2.0 * pi * noise.uniform();
  const double max_turn = style.heading_noise_deg * pi / 180.0;
  Vec2 hand = curve(0.0);
  Vec2 prev_plan = hand;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    if (i > 0) {
      const Vec2 plan = curve(s);
      const double a = noise.signed_half(max_turn);
      const Vec2 d = plan - prev_plan;
      hand += Vec2(std::cos(a) * d.x() - std::sin(a) * d.y(), std::sin(a) * d.x() + std::cos(a) * d.y());
      prev_plan = plan;
    }
    const double sway = style.sway_m * std::sin(2.0 * pi * 0.4 * s * style.duration_s + phase);
    const Vec2 xy(hand.x() + sway, hand.y() - sway);
    HandSample h;
    h.t_ms = t0_ms + 1000.0 * i / style.rate_hz;
    h.position = Vec3(xy.x(), xy.y(), rock.height(xy.x(), xy.y()) + style.hover_m);
    h.ray_dir = Vec3(0.0, 0.0, -1.0);
    h.pinch = true;
    stroke.samples.push_back(h);
  }
  return stroke;
}

namespace {

io::Trace make_trace(const std::string& task) {
  io::Trace trace;
  trace.header.mesh = "rock.obj";
  trace.header.task = task;
  return trace;
}

double next_start(const io::Trace& trace) {
  return trace.strokes.empty() ? 0.0 : trace.strokes.back().samples.back().t_ms + 750.0;
}

}  // namespace

io::Trace task1_trace(const Rock& rock) {
  io::Trace trace = make_trace("task1");
  Noise noise(0x7a51);
  TraceStyle style;
  style.heading_noise_deg = 0.8;
  for (int k = 0; k < 3; ++k) {
    const double y0 = -0.35 + 0.3 * k;
    const double amp = 0.12 + 0.03 * k;
    const auto curve = [=](double s) {
      const double x = -0.85 + 1.7 * s;
      return Vec2(x, y0 + amp * std::sin(pi * (1.2 * x + 0.2 * k)));
    };
    style.duration_s = 5.0 + 0.5 * k;
    trace.strokes.push_back(sample_stroke(rock, curve, style, noise, next_start(trace)));
  }
  return trace;
}

io::Trace task2_trace(const Rock& rock) {
  io::Trace trace = make_trace("task2");
  Noise noise(0x7a52);
  TraceStyle style;
  style.heading_noise_deg = 0.9;
  const struct {
    double cx, cy, rx, ry;
  } loops[] = {{0.0, 0.0, 0.7, 0.5}, {0.0, 0.0, 0.6, 0.45}, {0.0, 0.0, 0.5, 0.4}};
  for (const auto& l : loops) {
    const auto curve = [=](double s) {
      const double a = 2.0 * pi * s;
      const double r = 1.0 + 0.03 * std::sin(3.0 * a);
      return Vec2(l.cx + l.rx * r * std::cos(a), l.cy + l.ry * r * std::sin(a));
    };
    style.duration_s = 8.0;
    trace.strokes.push_back(sample_stroke(rock, curve, style, noise, next_start(trace)));
  }
  return trace;
}

io::Trace rapid_trace(const Rock& rock) {
  io::Trace trace = make_trace("rapid");
  Noise noise(0x7a53);
  TraceStyle style;
  style.rate_hz = 30.0;
  style.duration_s = 0.8;
  style.brush_radius = 0.01;
  // About 1.5 m in 0.8 s at 30 Hz: roughly 6 cm between samples.
  const auto swipe = [](Vec2 a, Vec2 b) { return [=](double s) { return Vec2(a + s * (b - a)); }; };
  trace.strokes.push_back(sample_stroke(rock, swipe({-0.9, -0.4}, {0.9, 0.45}), style, noise, 0.0));
  trace.strokes.push_back(
      sample_stroke(rock, swipe({-0.8, 0.5}, {0.7, -0.5}), style, noise, next_start(trace)));
  style.duration_s = 1.0;
  style.brush_radius = 0.015;
  trace.strokes.push_back(sample_stroke(
      rock, [](double s) { return Vec2(0.6 * std::cos(2.0 * pi * s), 0.4 * std::sin(2.0 * pi * s)); },
      style, noise, next_start(trace)));
  return trace;
}

}  // namespace surfsketch::fixtures
