#include "surfsketch/texture.hpp"

#include "surfsketch/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace surfsketch {

void PixelRect::extend(int x, int y) {
  if (empty()) {
    x0 = x1 = x;
    y0 = y1 = y;
    return;
  }
  x0 = std::min(x0, x);
  y0 = std::min(y0, y);
  x1 = std::max(x1, x);
  y1 = std::max(y1, y);
}

void PixelRect::extend(const PixelRect& o) {
  if (o.empty()) return;
  extend(o.x0, o.y0);
  extend(o.x1, o.y1);
}

TextureLayer::TextureLayer(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kArgument, "layer dimensions must be positive, got " + std::to_string(width) +
                                   "x" + std::to_string(height));
  }
  pixels_.assign(static_cast<std::size_t>(width) * height * 4, 0);
}

Rgba TextureLayer::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 4;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2], pixels_[i + 3]};
}

void TextureLayer::set(int x, int y, Rgba c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 4;
  if (pixels_[i] == c.r && pixels_[i + 1] == c.g && pixels_[i + 2] == c.b && pixels_[i + 3] == c.a) {
    return;
  }
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
  pixels_[i + 3] = c.a;
  dirty_.extend(x, y);
}

void TextureLayer::clear() {
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) set(x, y, kTransparent);
  }
}

std::size_t TextureLayer::painted_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < pixels_.size(); i += 4) {
    if (pixels_[i] | pixels_[i + 1] | pixels_[i + 2] | pixels_[i + 3]) ++n;
  }
  return n;
}

PixelRect TextureLayer::flush_dirty() {
  const PixelRect out = dirty_;
  dirty_ = PixelRect{};
  return out;
}

TextureLayer new_layer(int width, int height) { return TextureLayer(width, height); }

void stamp_disc(TextureLayer& layer, const Vec2& center_uv, double radius_px, Rgba color) {
  const Vec2 c = uv_to_pixel(layer, center_uv);
  const int w = layer.width();
  const int h = layer.height();
  const double r = std::max(radius_px, 0.0);

  const int cx = std::clamp(static_cast<int>(std::floor(c.x())), 0, w - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(c.y())), 0, h - 1);
  layer.set(cx, cy, color);

  const int x_lo = std::max(0, static_cast<int>(std::floor(c.x() - r - 0.5)));
  const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(c.x() + r - 0.5)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(c.y() - r - 0.5)));
  const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(c.y() + r - 0.5)));
  const double r2 = r * r;
  for (int y = y_lo; y <= y_hi; ++y) {
    const double dy = y + 0.5 - c.y();
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = x + 0.5 - c.x();
      if (dx * dx + dy * dy <= r2) layer.set(x, y, color);
    }
  }
}

double brush_radius_px(const Mesh& mesh, FaceId face, double radius_m, const TextureLayer& layer) {
  if (!mesh.has_uv(face)) {
    fail(ErrorCode::kStrokePaint, "face " + std::to_string(face) + " has no texture coordinates");
  }
  const auto [p0, p1, p2] = mesh.triangle(face);
  const FaceUv& uv = mesh.uv(face);
  const Vec2 x0 = uv_to_pixel(layer, uv[0]);
  const Vec2 x1 = uv_to_pixel(layer, uv[1]);
  const Vec2 x2 = uv_to_pixel(layer, uv[2]);

  Eigen::Matrix2d pixel_edges;
  pixel_edges.col(0) = x1 - x0;
  pixel_edges.col(1) = x2 - x0;
  const double det = pixel_edges.determinant();
  if (std::abs(det) < 1e-12) {
    fail(ErrorCode::kStrokePaint, "face " + std::to_string(face) + " has degenerate texture coordinates");
  }
  Eigen::Matrix<double, 3, 2> surface_edges;
  surface_edges.col(0) = p1 - p0;
  surface_edges.col(1) = p2 - p0;
  // Jacobian of the pixel -> surface map; its columns are the tangents.
  const Eigen::Matrix<double, 3, 2> jacobian = surface_edges * pixel_edges.inverse();
  const double stretch = 0.5 * (jacobian.col(0).norm() + jacobian.col(1).norm());
  return radius_m / stretch;
}

void StrokePainter::add(const SurfacePoint& p) {
  const double radius = brush_radius_px(*mesh_, p.face, brush_.radius, *layer_);
  stamp_disc(*layer_, p.uv, radius, brush_.color);
  if (last_ && mesh_->uv_continuous(last_->face, p.face)) {
    const Vec2 a = uv_to_pixel(*layer_, last_->uv);
    const Vec2 b = uv_to_pixel(*layer_, p.uv);
    const double dist = (b - a).norm();
    const int steps = static_cast<int>(std::ceil(dist / 0.5));
    for (int k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const Vec2 uv = (1.0 - t) * last_->uv + t * p.uv;
      stamp_disc(*layer_, uv, (1.0 - t) * last_radius_px_ + t * radius, brush_.color);
    }
  }
  last_ = p;
  last_radius_px_ = radius;
}

void paint_stroke(TextureLayer& layer, const Mesh& mesh, const ProjectedStroke& stroke,
                  const BrushSpec& brush) {
  StrokePainter painter(layer, mesh, brush);
  for (const StrokePoint& p : stroke.points) painter.add(p.surface);
}

void paint_polyline(TextureLayer& layer, const Mesh& mesh, std::span<const SurfacePoint> points,
                    const BrushSpec& brush) {
  StrokePainter painter(layer, mesh, brush);
  for (const SurfacePoint& p : points) painter.add(p);
}

}  // namespace surfsketch
