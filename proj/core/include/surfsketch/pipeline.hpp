#pragma once

#include "surfsketch/io/trace.hpp"
#include "surfsketch/session.hpp"

#include <filesystem>
#include <memory>
#include <vector>

namespace surfsketch {

struct ReplayOptions {
  VectorizeOptions vectorize;
  int layer_size = kDefaultLayerSize;
  std::size_t batch_size = 8;  // samples per streamed batch
  bool include_smoothed = false;
};

// Streams each trace through a fresh session exactly as a live client would,
// vectorizing every stroke after it ends.
struct ReplayResult {
  std::unique_ptr<Session> session;
  ExportBundle bundle;
  MetricsReport report;
};

ReplayResult replay(std::shared_ptr<const SpatialIndex> index, std::span<const io::Trace> traces,
                    const ReplayOptions& options = {});

// Writes strokes.csv, texture.png and metrics.json into dir (created if needed).
void write_bundle(const std::filesystem::path& dir, const ExportBundle& bundle);

}  // namespace surfsketch
