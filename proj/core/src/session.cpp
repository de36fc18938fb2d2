#include "surfsketch/session.hpp"

#include "surfsketch/error.hpp"
#include "surfsketch/io/csv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace surfsketch {

std::string_view mode_name(DrawMode mode) {
  return mode == DrawMode::kFreehand ? "freehand" : "tapline";
}

DrawMode parse_mode(std::string_view name) {
  if (name == "freehand") return DrawMode::kFreehand;
  if (name == "tapline") return DrawMode::kTapline;
  fail(ErrorCode::kArgument, "unknown mode '" + std::string(name) + "'");
}

Session::Session(std::string id, std::shared_ptr<const SpatialIndex> index, int layer_size,
                 VectorizeOptions options)
    : id_(std::move(id)),
      index_(std::move(index)),
      layer_(layer_size, layer_size),
      options_(options) {
  if (!index_) fail(ErrorCode::kArgument, "session needs a spatial index");
}

void Session::check_open() const {
  if (closed_) fail(ErrorCode::kSessionClosed, "session " + id_ + " is closed");
}

StrokeRecord* Session::find_stroke(std::int64_t id) {
  for (StrokeRecord& s : strokes_) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

PathRecord* Session::find_path(std::int64_t id) {
  for (PathRecord& p : paths_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const StrokeRecord& Session::stroke(std::int64_t id) const {
  const StrokeRecord* s = const_cast<Session*>(this)->find_stroke(id);
  if (!s) fail(ErrorCode::kNotFound, "no stroke " + std::to_string(id));
  return *s;
}

const PathRecord& Session::path(std::int64_t id) const {
  const PathRecord* p = const_cast<Session*>(this)->find_path(id);
  if (!p) fail(ErrorCode::kNotFound, "no path " + std::to_string(id));
  return *p;
}

StreamDelta Session::stream_samples(std::span<const HandSample> batch) {
  check_open();
  if (mode_ != DrawMode::kFreehand) {
    fail(ErrorCode::kModeMismatch, "samples are only accepted in freehand mode");
  }
  // Validate the whole batch before touching state.
  double last_t = active_ && !strokes_[active_->record].raw.samples.empty()
                      ? strokes_[active_->record].raw.samples.back().t_ms
                      : -INFINITY;
  bool open = active_.has_value();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const HandSample& s = batch[i];
    if (!s.position.allFinite() || !s.ray_dir.allFinite() || !std::isfinite(s.t_ms)) {
      fail(ErrorCode::kValidation, "sample " + std::to_string(i) + " is not finite");
    }
    if (!s.pinch) {
      open = false;
      continue;
    }
    if (std::abs(s.ray_dir.norm() - 1.0) > 1e-6) {
      fail(ErrorCode::kValidation, "sample " + std::to_string(i) + " ray is not unit length");
    }
    if (open && s.t_ms < last_t) {
      fail(ErrorCode::kValidation, "sample " + std::to_string(i) + " timestamp decreases");
    }
    open = true;
    last_t = s.t_ms;
  }

  StreamDelta delta;
  const Mesh& mesh = index_->mesh();
  for (const HandSample& s : batch) {
    if (!s.pinch) {
      finish_active(delta);
      continue;
    }
    if (!active_) {
      StrokeRecord rec;
      rec.id = next_id_++;
      rec.task_id = task_;
      rec.raw.brush_radius = brush_.radius;
      rec.raw.color = brush_.color;
      rec.projected.brush_radius = brush_.radius;
      rec.projected.color = brush_.color;
      rec.projected.densified = true;
      strokes_.push_back(std::move(rec));
      active_.emplace(ActiveStroke{strokes_.size() - 1, MimicryProjector(*index_),
                                   StrokePainter(layer_, mesh, brush_)});
    }
    StrokeRecord& rec = strokes_[active_->record];
    if (delta.stroke_id != rec.id) {
      // A batch carrying two strokes reports points of the later one only.
      delta.stroke_id = rec.id;
      delta.points.clear();
    }
    const auto source = static_cast<std::int32_t>(rec.raw.samples.size());
    rec.raw.samples.push_back(s);
    const std::optional<StrokePoint> q = active_->projector.add(s, source);
    if (!q) continue;
    std::vector<StrokePoint> fresh;
    if (!rec.projected.points.empty()) {
      fresh = bridge_segment(*index_, rec.projected.points.back(), *q, rec.projected.brush_radius);
    }
    fresh.push_back(*q);
    for (const StrokePoint& p : fresh) {
      rec.projected.points.push_back(p);
      delta.points.push_back(p);
      if (rec.visible) active_->painter.add(p.surface);
    }
  }
  delta.dirty = layer_.flush_dirty();
  return delta;
}

void Session::finish_active(StreamDelta& delta) {
  if (!active_) return;
  StrokeRecord& rec = strokes_[active_->record];
  rec.finalized = true;
  delta.finalized.push_back(rec.id);
  active_.reset();
}

StreamDelta Session::end_stroke() {
  check_open();
  StreamDelta delta;
  finish_active(delta);
  delta.dirty = layer_.flush_dirty();
  return delta;
}

const PathRecord& Session::vectorize_stroke(std::int64_t stroke_id) {
  check_open();
  StrokeRecord* rec = find_stroke(stroke_id);
  if (!rec) fail(ErrorCode::kNotFound, "no stroke " + std::to_string(stroke_id));
  if (rec->path_id) return path(*rec->path_id);
  if (active_ && strokes_[active_->record].id == stroke_id) {
    StreamDelta ignored;
    finish_active(ignored);
  }
  if (!rec->finalized) fail(ErrorCode::kInvalidState, "stroke is not finished");

  const double diag = index_->mesh().diagonal();
  const VectorChain chain = path_walk(to_chain(rec->projected, diag), options_.angle_tol_deg);
  PathRecord path_rec;
  path_rec.id = rec->id;
  path_rec.source_stroke = rec->id;
  path_rec.path = conform_to_surface(*index_, smooth_catmull_rom(chain, options_.subdivisions));
  path_rec.brush = BrushSpec{rec->projected.brush_radius, rec->projected.color};
  path_rec.visible = true;

  rec->path_id = path_rec.id;
  rec->visible = false;
  StreamDelta ignored;
  finish_active(ignored);
  paths_.push_back(std::move(path_rec));
  close_tapline();
  mode_ = DrawMode::kTapline;
  rerender();
  return paths_.back();
}

PathDelta Session::edit_point(std::int64_t path_id, std::size_t index, const Vec3& position) {
  check_open();
  if (!position.allFinite()) fail(ErrorCode::kValidation, "edit position is not finite");
  PathRecord* rec = find_path(path_id);
  if (!rec) fail(ErrorCode::kNotFound, "no path " + std::to_string(path_id));
  rec->path = edit_control_point(*index_, rec->path, index, position);
  if (tapline_path_ == path_id) tapline_.path = rec->path;
  rerender();
  PathDelta delta;
  delta.path_id = rec->id;
  delta.record = rec;
  delta.dirty = layer_.flush_dirty();
  return delta;
}

PathDelta Session::tapline_point(const Vec3& position_hint) {
  check_open();
  if (mode_ != DrawMode::kTapline) {
    fail(ErrorCode::kModeMismatch, "tapline points are only accepted in tapline mode");
  }
  if (!position_hint.allFinite()) fail(ErrorCode::kValidation, "tapline point is not finite");
  const SurfacePoint sp = index_->closest_point(position_hint);
  tapline_ = tapline_append(*index_, std::move(tapline_), sp, inward_ray(index_->mesh(), sp),
                            options_.subdivisions);
  PathDelta delta;
  if (!tapline_.path) {
    delta.pending = tapline_.pending;
    return delta;
  }
  PathRecord* rec = tapline_path_ ? find_path(*tapline_path_) : nullptr;
  if (!rec) {
    PathRecord fresh;
    fresh.id = next_id_++;
    fresh.brush = brush_;
    paths_.push_back(std::move(fresh));
    rec = &paths_.back();
    tapline_path_ = rec->id;
  }
  rec->path = *tapline_.path;
  rerender();
  delta.path_id = rec->id;
  delta.record = rec;
  delta.dirty = layer_.flush_dirty();
  return delta;
}

void Session::close_tapline() {
  tapline_ = TaplineDraft{};
  tapline_path_.reset();
}

void Session::set_brush(const BrushSpec& brush) {
  check_open();
  if (!(brush.radius > 0.0) || !std::isfinite(brush.radius)) {
    fail(ErrorCode::kArgument, "brush radius must be positive");
  }
  brush_ = brush;
}

void Session::set_mode(DrawMode mode) {
  check_open();
  if (mode == mode_) return;
  if (mode == DrawMode::kTapline) {
    fail(ErrorCode::kInvalidTransition, "tapline mode is entered by vectorizing a stroke");
  }
  close_tapline();
  mode_ = mode;
}

PixelRect Session::clear_canvas() {
  check_open();
  StreamDelta ignored;
  finish_active(ignored);
  close_tapline();
  for (StrokeRecord& s : strokes_) s.visible = false;
  for (PathRecord& p : paths_) p.visible = false;
  rerender();
  return layer_.flush_dirty();
}

void Session::rerender() {
  const Mesh& mesh = index_->mesh();
  TextureLayer fresh(layer_.width(), layer_.height());
  // Painting order follows creation order; a vectorized stroke and its path
  // share an id.
  std::vector<std::pair<std::int64_t, std::function<void()>>> items;
  for (const StrokeRecord& s : strokes_) {
    if (!s.visible) continue;
    items.emplace_back(s.id, [&] {
      paint_stroke(fresh, mesh, s.projected, BrushSpec{s.projected.brush_radius, s.projected.color});
    });
  }
  for (const PathRecord& p : paths_) {
    if (!p.visible) continue;
    items.emplace_back(p.id, [&] {
      const auto pts = p.path.surface_polyline();
      paint_polyline(fresh, mesh, pts, p.brush);
    });
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& item : items) item.second();

  const auto src = fresh.rgba();
  const auto dst = layer_.rgba();
  for (int y = 0; y < layer_.height(); ++y) {
    for (int x = 0; x < layer_.width(); ++x) {
      const std::size_t o = (static_cast<std::size_t>(y) * layer_.width() + x) * 4;
      if (std::equal(src.begin() + o, src.begin() + o + 4, dst.begin() + o)) continue;
      layer_.set(x, y, fresh.at(x, y));
    }
  }
}

ExportBundle Session::export_bundle(bool include_smoothed) const {
  check_open();
  std::vector<io::ExportStroke> rows;
  for (const StrokeRecord& s : strokes_) {
    io::ExportStroke e;
    e.stroke_id = s.id;
    for (const SurfacePoint& p : s.projected.sample_points()) e.raw.push_back(p.position);
    if (s.path_id) {
      const PathRecord& p = path(*s.path_id);
      for (const SurfacePoint& c : p.path.chain.points) e.vector.push_back(c.position);
      for (const SurfacePoint& c : p.path.surface_polyline()) e.smoothed.push_back(c.position);
    }
    rows.push_back(std::move(e));
  }
  for (const PathRecord& p : paths_) {
    if (p.source_stroke) continue;
    io::ExportStroke e;
    e.stroke_id = p.id;
    for (const SurfacePoint& c : p.path.chain.points) e.vector.push_back(c.position);
    for (const SurfacePoint& c : p.path.surface_polyline()) e.smoothed.push_back(c.position);
    rows.push_back(std::move(e));
  }
  std::sort(rows.begin(), rows.end(),
            [](const io::ExportStroke& a, const io::ExportStroke& b) { return a.stroke_id < b.stroke_id; });

  ExportBundle bundle;
  bundle.csv = io::export_csv(rows, include_smoothed);
  bundle.texture_png = export_raster(layer_);
  const bool any_vectorized =
      std::any_of(strokes_.begin(), strokes_.end(), [](const StrokeRecord& s) { return s.path_id.has_value(); });
  if (any_vectorized) bundle.metrics_json = report().to_json();
  return bundle;
}

MetricsReport Session::report() const {
  std::vector<StrokeMetricsInput> inputs;
  for (const StrokeRecord& s : strokes_) {
    if (!s.path_id) continue;
    const PathRecord& p = path(*s.path_id);
    StrokeMetricsInput in;
    in.task_id = s.task_id;
    in.stroke_id = s.id;
    for (const SurfacePoint& q : s.projected.sample_points()) in.raw.push_back(q.position);
    in.vector_polyline = p.path.polyline();
    for (const SurfacePoint& c : p.path.chain.points) in.control_points.push_back(c.position);
    inputs.push_back(std::move(in));
  }
  return build_report(inputs, index_->mesh().diagonal());
}

}  // namespace surfsketch
