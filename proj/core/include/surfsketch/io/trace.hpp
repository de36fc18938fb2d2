#pragma once

#include "surfsketch/projection.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace surfsketch::io {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  int version = kTraceVersion;
  std::string mesh;       // model reference, informational
  std::string task = "default";
  std::string units = "meters";

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
  TraceHeader header;
  std::vector<RawStroke> strokes;

  friend bool operator==(const Trace&, const Trace&) = default;
};

// Line-delimited JSON. The first line is the header
//   {"format":"surfsketch-trace","version":1,"mesh":...,"task":...,"units":"meters"}
// followed by one record per line:
//   {"type":"brush","radius":0.01,"color":[r,g,b,a]}
//   {"type":"sample","t":12.5,"p":[x,y,z],"ray":[x,y,z],"pinch":true}
// A stroke is a maximal run of pinch=true samples; brush records apply to
// strokes that begin after them. Errors name the 1-based line.
Trace parse_trace(std::string_view text);
Trace read_trace(const std::filesystem::path& path);

// Canonical form: header, then per stroke a brush record when the brush
// changes, its samples, and a pinch=false release sample.
std::string write_trace(const Trace& trace);

// Single sample / brush record lines, used by the trace recorder.
std::string sample_record(const HandSample& sample);

}  // namespace surfsketch::io
