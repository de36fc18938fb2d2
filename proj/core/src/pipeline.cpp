#include "surfsketch/pipeline.hpp"

#include "surfsketch/error.hpp"

#include <fstream>

namespace surfsketch {

ReplayResult replay(std::shared_ptr<const SpatialIndex> index, std::span<const io::Trace> traces,
                    const ReplayOptions& options) {
  if (options.batch_size == 0) fail(ErrorCode::kArgument, "batch size must be positive");
  ReplayResult result;
  result.session = std::make_unique<Session>("replay", std::move(index), options.layer_size,
                                             options.vectorize);
  Session& s = *result.session;
  for (const io::Trace& trace : traces) {
    s.set_task(trace.header.task);
    for (const RawStroke& stroke : trace.strokes) {
      s.set_mode(DrawMode::kFreehand);
      s.set_brush(BrushSpec{stroke.brush_radius, stroke.color});
      std::int64_t id = 0;
      for (std::size_t i = 0; i < stroke.samples.size(); i += options.batch_size) {
        const std::size_t n = std::min(options.batch_size, stroke.samples.size() - i);
        const StreamDelta d = s.stream_samples(std::span(stroke.samples).subspan(i, n));
        if (d.stroke_id) id = d.stroke_id;
      }
      s.end_stroke();
      if (id) s.vectorize_stroke(id);
    }
  }
  result.bundle = s.export_bundle(options.include_smoothed);
  result.report = s.report();
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void write_bundle(const std::filesystem::path& dir, const ExportBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "strokes.csv", bundle.csv);
  write_file(dir / "texture.png",
             std::string_view(reinterpret_cast<const char*>(bundle.texture_png.data()),
                              bundle.texture_png.size()));
  if (bundle.metrics_json) write_file(dir / "metrics.json", *bundle.metrics_json);
}

}  // namespace surfsketch
