#pragma once

#include "surfsketch/color.hpp"
#include "surfsketch/mesh.hpp"
#include "surfsketch/projection.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace surfsketch {

inline constexpr int kDefaultLayerSize = 2048;

// Inclusive pixel bounds.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  bool empty() const { return x1 < x0 || y1 < y0; }
  void extend(int x, int y);
  void extend(const PixelRect& o);
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

// RGBA8 raster bound to the mesh UV atlas. Row 0 is the top of the image,
// i.e. v = 1. Texel (x, y) covers uv-space pixel square [x, x+1) x [y, y+1)
// where pixel coordinates are (u * width, (1 - v) * height).
class TextureLayer {
 public:
  TextureLayer(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgba at(int x, int y) const;
  // Writes a texel; extends the dirty rect only when the value changes.
  void set(int x, int y, Rgba color);
  void clear();

  std::span<const std::uint8_t> rgba() const { return pixels_; }
  std::size_t painted_count() const;

  // Rect covering every texel whose value changed since the last flush.
  const PixelRect& dirty() const { return dirty_; }
  PixelRect flush_dirty();

  friend bool operator==(const TextureLayer& l, const TextureLayer& r) {
    return l.width_ == r.width_ && l.height_ == r.height_ && l.pixels_ == r.pixels_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
  PixelRect dirty_;
};

TextureLayer new_layer(int width, int height);

struct BrushSpec {
  double radius = 0.01;  // meters, measured on the surface
  Rgba color = kDefaultInk;
};

inline Vec2 uv_to_pixel(const TextureLayer& layer, const Vec2& uv) {
  return {uv.x() * layer.width(), (1.0 - uv.y()) * layer.height()};
}

// Sets every texel whose center is within radius_px of the center (pixel
// space), plus the texel containing the center. Hard edged; clipped to the
// raster.
void stamp_disc(TextureLayer& layer, const Vec2& center_uv, double radius_px, Rgba color);

// Brush radius in pixels for a face: meters divided by the mean of the
// face's two tangent stretch factors (meters per pixel along x and y).
double brush_radius_px(const Mesh& mesh, FaceId face, double radius_m, const TextureLayer& layer);

// Paints successive surface points as discs. Consecutive points within one
// UV chart (same face, or adjacent faces whose UVs agree on the shared edge)
// are also joined by a run of discs along their uv segment.
class StrokePainter {
 public:
  StrokePainter(TextureLayer& layer, const Mesh& mesh, BrushSpec brush)
      : layer_(&layer), mesh_(&mesh), brush_(brush) {}

  void add(const SurfacePoint& p);

 private:
  TextureLayer* layer_;
  const Mesh* mesh_;
  BrushSpec brush_;
  std::optional<SurfacePoint> last_;
  double last_radius_px_ = 0.0;
};

void paint_stroke(TextureLayer& layer, const Mesh& mesh, const ProjectedStroke& stroke,
                  const BrushSpec& brush);
void paint_polyline(TextureLayer& layer, const Mesh& mesh, std::span<const SurfacePoint> points,
                    const BrushSpec& brush);

// Lossless PNG (RGBA8, no ancillary chunks).
std::vector<std::uint8_t> export_raster(const TextureLayer& layer);
TextureLayer import_raster(std::span<const std::uint8_t> png);

}  // namespace surfsketch
