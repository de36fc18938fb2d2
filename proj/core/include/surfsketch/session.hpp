#pragma once

#include "surfsketch/metrics.hpp"
#include "surfsketch/projection.hpp"
#include "surfsketch/texture.hpp"
#include "surfsketch/vectorize.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace surfsketch {

enum class DrawMode { kFreehand, kTapline };

std::string_view mode_name(DrawMode mode);
DrawMode parse_mode(std::string_view name);

struct VectorizeOptions {
  double angle_tol_deg = kDefaultAngleToleranceDeg;
  int subdivisions = kDefaultSubdivisions;
};

struct StrokeRecord {
  std::int64_t id = 0;
  std::string task_id;
  RawStroke raw;
  ProjectedStroke projected;  // gap-bridged
  bool finalized = false;
  bool visible = true;  // raster marks present on the layer
  std::optional<std::int64_t> path_id;
};

struct PathRecord {
  std::int64_t id = 0;
  std::optional<std::int64_t> source_stroke;  // empty for tapline paths
  VectorPath path;
  BrushSpec brush;
  bool visible = true;
};

struct StreamDelta {
  std::int64_t stroke_id = 0;  // stroke the new points belong to; 0 if none
  std::vector<StrokePoint> points;
  std::vector<std::int64_t> finalized;
  PixelRect dirty;
};

struct PathDelta {
  std::int64_t path_id = 0;  // 0 while a tapline point is pending
  const PathRecord* record = nullptr;
  std::optional<SurfacePoint> pending;
  PixelRect dirty;
};

struct ExportBundle {
  std::string csv;
  std::vector<std::uint8_t> texture_png;
  std::optional<std::string> metrics_json;
};

// All drawing state for one client. Not thread-safe; the service serializes
// commands per session.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const SpatialIndex> index, int layer_size = kDefaultLayerSize,
          VectorizeOptions options = {});
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  DrawMode mode() const { return mode_; }
  const BrushSpec& brush() const { return brush_; }
  const TextureLayer& layer() const { return layer_; }
  const SpatialIndex& index() const { return *index_; }
  const std::vector<StrokeRecord>& strokes() const { return strokes_; }
  const std::vector<PathRecord>& paths() const { return paths_; }
  const StrokeRecord& stroke(std::int64_t id) const;
  const PathRecord& path(std::int64_t id) const;
  const VectorizeOptions& options() const { return options_; }
  bool closed() const { return closed_; }

  // Label attached to strokes begun from now on; used to group metrics.
  void set_task(std::string task) { task_ = std::move(task); }
  void set_options(VectorizeOptions options) { options_ = options; }

  StreamDelta stream_samples(std::span<const HandSample> batch);
  StreamDelta end_stroke();
  const PathRecord& vectorize_stroke(std::int64_t stroke_id);
  PathDelta edit_point(std::int64_t path_id, std::size_t index, const Vec3& position);
  PathDelta tapline_point(const Vec3& position_hint);
  void set_brush(const BrushSpec& brush);
  void set_mode(DrawMode mode);
  PixelRect clear_canvas();
  void close() { closed_ = true; }
  // Texels changed since the last delta was reported.
  PixelRect flush_dirty() { return layer_.flush_dirty(); }

  ExportBundle export_bundle(bool include_smoothed = false) const;
  // Throws kEmptyReport when nothing has been vectorized.
  MetricsReport report() const;

 private:
  void check_open() const;
  StrokeRecord* find_stroke(std::int64_t id);
  PathRecord* find_path(std::int64_t id);
  void finish_active(StreamDelta& delta);
  void close_tapline();
  // Repaints every visible item into a fresh raster and copies the changed
  // texels over, so the dirty rect covers exactly what changed.
  void rerender();

  std::string id_;
  std::shared_ptr<const SpatialIndex> index_;
  TextureLayer layer_;
  VectorizeOptions options_;
  DrawMode mode_ = DrawMode::kFreehand;
  BrushSpec brush_;
  std::string task_ = "default";
  bool closed_ = false;
  std::int64_t next_id_ = 1;

  std::vector<StrokeRecord> strokes_;
  std::vector<PathRecord> paths_;

  struct ActiveStroke {
    std::size_t record;
    MimicryProjector projector;
    StrokePainter painter;
  };
  std::optional<ActiveStroke> active_;

  TaplineDraft tapline_;
  std::optional<std::int64_t> tapline_path_;
};

}  // namespace surfsketch
