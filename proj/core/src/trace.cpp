#include "surfsketch/io/trace.hpp"

#include "surfsketch/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace surfsketch::io {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "surfsketch-trace";

[[noreturn]] void trace_error(ErrorCode code, std::size_t line_no, const std::string& what) {
  fail(code, "trace line " + std::to_string(line_no) + ": " + what);
}

Vec3 read_vec3(const json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array() || it->size() != 3) {
    trace_error(ErrorCode::kParse, line_no, std::string("field '") + key + "' must be [x,y,z]");
  }
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!(*it)[k].is_number()) trace_error(ErrorCode::kParse, line_no, std::string("non-numeric '") + key + "'");
    v[k] = (*it)[k].get<double>();
    if (!std::isfinite(v[k])) trace_error(ErrorCode::kValidation, line_no, std::string("non-finite '") + key + "'");
  }
  return v;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json color_json(const Rgba& c) { return json::array({c.r, c.g, c.b, c.a}); }

}  // namespace

Trace parse_trace(std::string_view text) {
  Trace trace;
  bool have_header = false;
  double brush_radius = RawStroke{}.brush_radius;
  Rgba color = RawStroke{}.color;
  std::optional<RawStroke> active;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      trace_error(ErrorCode::kParse, line_no, e.what());
    }
    if (!j.is_object()) trace_error(ErrorCode::kParse, line_no, "record must be an object");

    if (!have_header) {
      if (j.value("format", "") != kFormat) trace_error(ErrorCode::kParse, line_no, "missing trace header");
      const int version = j.value("version", 0);
      if (version != kTraceVersion) {
        trace_error(ErrorCode::kUnknownVersion, line_no, "unsupported trace version " + std::to_string(version));
      }
      trace.header.version = version;
      trace.header.mesh = j.value("mesh", "");
      trace.header.task = j.value("task", "default");
      trace.header.units = j.value("units", "meters");
      if (trace.header.units != "meters") trace_error(ErrorCode::kValidation, line_no, "units must be meters");
      have_header = true;
      continue;
    }

    const std::string type = j.value("type", "");
    if (type == "brush") {
      brush_radius = j.value("radius", 0.0);
      if (!(brush_radius > 0.0)) trace_error(ErrorCode::kValidation, line_no, "brush radius must be positive");
      const auto c = j.find("color");
      if (c == j.end() || !c->is_array() || c->size() != 4) {
        trace_error(ErrorCode::kParse, line_no, "brush color must be [r,g,b,a]");
      }
      std::uint8_t rgba[4];
      for (int k = 0; k < 4; ++k) {
        const int v = (*c)[k].get<int>();
        if (v < 0 || v > 255) trace_error(ErrorCode::kValidation, line_no, "color component out of range");
        rgba[k] = static_cast<std::uint8_t>(v);
      }
      color = Rgba{rgba[0], rgba[1], rgba[2], rgba[3]};
    } else if (type == "sample") {
      HandSample s;
      const auto t = j.find("t");
      if (t == j.end() || !t->is_number()) trace_error(ErrorCode::kParse, line_no, "sample needs numeric 't'");
      s.t_ms = t->get<double>();
      s.position = read_vec3(j, "p", line_no);
      s.ray_dir = read_vec3(j, "ray", line_no);
      s.pinch = j.value("pinch", false);
      if (!(std::abs(s.ray_dir.norm() - 1.0) <= 1e-6)) {
        trace_error(ErrorCode::kValidation, line_no, "ray must be unit length");
      }
      if (!s.pinch) {
        if (active) {
          trace.strokes.push_back(std::move(*active));
          active.reset();
        }
        continue;
      }
      if (!active) {
        active.emplace();
        active->brush_radius = brush_radius;
        active->color = color;
      } else if (s.t_ms < active->samples.back().t_ms) {
        trace_error(ErrorCode::kValidation, line_no, "timestamp decreases within a stroke");
      }
      active->samples.push_back(s);
    } else {
      trace_error(ErrorCode::kParse, line_no, "unknown record type '" + type + "'");
    }
  }
  if (!have_header) fail(ErrorCode::kParse, "trace is empty");
  if (active) trace.strokes.push_back(std::move(*active));
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open trace " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string sample_record(const HandSample& sample) {
  const json j = {{"type", "sample"},
                  {"t", sample.t_ms},
                  {"p", vec_json(sample.position)},
                  {"ray", vec_json(sample.ray_dir)},
                  {"pinch", sample.pinch}};
  return j.dump();
}

std::string write_trace(const Trace& trace) {
  std::string out;
  const json header = {{"format", kFormat},
                       {"version", trace.header.version},
                       {"mesh", trace.header.mesh},
                       {"task", trace.header.task},
                       {"units", trace.header.units}};
  out += header.dump() + "\n";
  std::optional<std::pair<double, Rgba>> brush;
  for (const RawStroke& stroke : trace.strokes) {
    if (stroke.samples.empty()) continue;
    if (!brush || brush->first != stroke.brush_radius || brush->second != stroke.color) {
      const json b = {{"type", "brush"}, {"radius", stroke.brush_radius}, {"color", color_json(stroke.color)}};
      out += b.dump() + "\n";
      brush = std::make_pair(stroke.brush_radius, stroke.color);
    }
    for (HandSample s : stroke.samples) {
      s.pinch = true;
      out += sample_record(s) + "\n";
    }
    HandSample release = stroke.samples.back();
    release.pinch = false;
    out += sample_record(release) + "\n";
  }
  return out;
}

}  // namespace surfsketch::io
