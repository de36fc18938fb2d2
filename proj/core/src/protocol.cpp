#include "surfsketch/protocol.hpp"

#include "surfsketch/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>

namespace surfsketch {
namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorCode::kValidation, std::string(what) + " must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) fail(ErrorCode::kValidation, std::string(what) + " must hold numbers");
    v[i] = j[i].get<double>();
  }
  if (!v.allFinite()) fail(ErrorCode::kValidation, std::string(what) + " is not finite");
  return v;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParse, "request body is not valid JSON");
  if (!j.is_object()) fail(ErrorCode::kParse, "request body must be a JSON object");
  return j;
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::kValidation, std::string("missing field '") + key + "'");
  return *it;
}

HandSample parse_sample(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kValidation, "sample must be an object");
  HandSample s;
  const json& t = field(j, "t");
  if (!t.is_number()) fail(ErrorCode::kValidation, "sample t must be a number");
  s.t_ms = t.get<double>();
  s.position = parse_vec3(field(j, "p"), "sample p");
  s.ray_dir = parse_vec3(field(j, "ray"), "sample ray");
  const auto pinch = j.find("pinch");
  if (pinch != j.end()) {
    if (!pinch->is_boolean()) fail(ErrorCode::kValidation, "sample pinch must be a boolean");
    s.pinch = pinch->get<bool>();
  } else {
    s.pinch = true;
  }
  return s;
}

json rect_json(const PixelRect& r) {
  if (r.empty()) return nullptr;
  return {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

json point_json(const SurfacePoint& p) {
  return {{"p", vec_json(p.position)}, {"uv", json::array({p.uv.x(), p.uv.y()})}, {"face", p.face}};
}

json path_json(const PathRecord& rec) {
  json ctrl = json::array();
  for (const SurfacePoint& c : rec.path.chain.points) ctrl.push_back(vec_json(c.position));
  json poly = json::array();
  for (const SurfacePoint& p : rec.path.surface_polyline()) poly.push_back(vec_json(p.position));
  return {{"path_id", rec.id},
          {"source_stroke", rec.source_stroke ? json(*rec.source_stroke) : json(nullptr)},
          {"control_points", std::move(ctrl)},
          {"polyline", std::move(poly)},
          {"brush_radius", rec.brush.radius}};
}

json delta_json(const StreamDelta& d) {
  json pts = json::array();
  for (const StrokePoint& p : d.points) {
    json q = point_json(p.surface);
    q["inserted"] = p.inserted();
    pts.push_back(std::move(q));
  }
  return {{"type", "projected_delta"},
          {"stroke_id", d.stroke_id},
          {"points", std::move(pts)},
          {"finalized", d.finalized},
          {"dirty", rect_json(d.dirty)}};
}

json path_delta_json(const PathDelta& d) {
  json j = {{"type", "path_delta"}, {"path_id", d.path_id}, {"dirty", rect_json(d.dirty)}};
  j["path"] = d.record ? path_json(*d.record) : json(nullptr);
  j["pending"] = d.pending ? point_json(*d.pending) : json(nullptr);
  return j;
}

json vectorized_json(const PathRecord& rec, const PixelRect& dirty, DrawMode mode) {
  return {{"type", "vectorized"},
          {"stroke_id", rec.source_stroke.value_or(rec.id)},
          {"path", path_json(rec)},
          {"mode", mode_name(mode)},
          {"dirty", rect_json(dirty)}};
}

json error_json(ErrorCode code, std::string_view message) {
  return {{"type", "error"}, {"error", error_name(code)}, {"message", message}};
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    const auto slash = path.find('/');
    out.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash);
  }
  return out;
}

std::int64_t parse_id(std::string_view s, const char* what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    fail(ErrorCode::kNotFound, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

int query_int(std::string_view query, std::string_view key, int fallback) {
  while (!query.empty()) {
    const auto amp = query.find('&');
    const std::string_view pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (eq != std::string_view::npos && pair.substr(0, eq) == key) {
      const std::string_view value = pair.substr(eq + 1);
      int v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        fail(ErrorCode::kValidation, "query parameter " + std::string(key) + " is not an integer");
      }
      return v;
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return fallback;
}

Rgba parse_color(const json& j) {
  if (!j.is_array() || j.size() != 4) fail(ErrorCode::kValidation, "color must be [r,g,b,a]");
  std::array<std::uint8_t, 4> c{};
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255) {
      fail(ErrorCode::kValidation, "color channels must be integers in 0..255");
    }
    c[i] = static_cast<std::uint8_t>(j[i].get<int>());
  }
  return Rgba{c[0], c[1], c[2], c[3]};
}

HttpResponse json_response(int status, const json& j) { return {status, "application/json", j.dump()}; }

std::vector<std::uint8_t> crop_png(const TextureLayer& layer, PixelRect r) {
  r.x0 = std::max(r.x0, 0);
  r.y0 = std::max(r.y0, 0);
  r.x1 = std::min(r.x1, layer.width() - 1);
  r.y1 = std::min(r.y1, layer.height() - 1);
  if (r.empty()) fail(ErrorCode::kValidation, "patch rectangle is empty");
  TextureLayer patch(r.x1 - r.x0 + 1, r.y1 - r.y0 + 1);
  for (int y = r.y0; y <= r.y1; ++y) {
    for (int x = r.x0; x <= r.x1; ++x) patch.set(x - r.x0, y - r.y0, layer.at(x, y));
  }
  return export_raster(patch);
}

json session_json(Session& s) {
  return {{"session_id", s.id()},
          {"mode", mode_name(s.mode())},
          {"closed", s.closed()},
          {"stroke_count", s.strokes().size()},
          {"path_count", s.paths().size()},
          {"brush", {{"radius", s.brush().radius},
                     {"color", json::array({s.brush().color.r, s.brush().color.g, s.brush().color.b,
                                            s.brush().color.a})}}},
          {"layer", {{"width", s.layer().width()}, {"height", s.layer().height()}}},
          {"mesh_diagonal_m", s.index().mesh().diagonal()}};
}

std::vector<HandSample> parse_samples(const json& body) {
  const json& arr = field(body, "samples");
  if (!arr.is_array()) fail(ErrorCode::kValidation, "samples must be an array");
  std::vector<HandSample> out;
  out.reserve(arr.size());
  for (const json& s : arr) out.push_back(parse_sample(s));
  return out;
}

HttpResponse route_session(Service& service, std::string_view method,
                           const std::vector<std::string_view>& seg, std::string_view query,
                           std::string_view raw_body) {
  const std::string id(seg[1]);
  const auto is = [&](std::string_view m, std::initializer_list<std::string_view> rest) {
    if (method != m || seg.size() != rest.size() + 2) return false;
    std::size_t i = 2;
    for (std::string_view r : rest) {
      if (r != "*" && seg[i] != r) return false;
      ++i;
    }
    return true;
  };

  if (is("DELETE", {})) {
    service.close_session(id);
    return json_response(200, {{"session_id", id}, {"closed", true}});
  }
  return service.with_session(id, [&](Session& s) -> HttpResponse {
    if (is("GET", {})) {
      if (s.closed()) fail(ErrorCode::kSessionClosed, "session " + id + " is closed");
      return json_response(200, session_json(s));
    }
    if (is("POST", {"samples"})) {
      const json body = parse_body(raw_body);
      const auto samples = parse_samples(body);
      return json_response(200, delta_json(s.stream_samples(samples)));
    }
    if (is("POST", {"stroke_end"})) return json_response(200, delta_json(s.end_stroke()));
    if (is("POST", {"strokes", "*", "vectorize"})) {
      const PathRecord& rec = s.vectorize_stroke(parse_id(seg[3], "stroke id"));
      const PixelRect dirty = s.flush_dirty();
      return json_response(200, vectorized_json(rec, dirty, s.mode()));
    }
    if (is("POST", {"paths", "*", "points", "*"})) {
      const json body = parse_body(raw_body);
      const auto index = static_cast<std::size_t>(parse_id(seg[5], "point index"));
      return json_response(
          200, path_delta_json(s.edit_point(parse_id(seg[3], "path id"), index,
                                            parse_vec3(field(body, "p"), "p"))));
    }
    if (is("POST", {"tapline"})) {
      const json body = parse_body(raw_body);
      return json_response(200, path_delta_json(s.tapline_point(parse_vec3(field(body, "p"), "p"))));
    }
    if (is("POST", {"brush"})) {
      const json body = parse_body(raw_body);
      BrushSpec brush = s.brush();
      if (const auto it = body.find("radius"); it != body.end()) {
        if (!it->is_number()) fail(ErrorCode::kValidation, "radius must be a number");
        brush.radius = it->get<double>();
      }
      if (const auto it = body.find("color"); it != body.end()) brush.color = parse_color(*it);
      s.set_brush(brush);
      return json_response(200, session_json(s));
    }
    if (is("POST", {"mode"})) {
      const json body = parse_body(raw_body);
      const json& m = field(body, "mode");
      if (!m.is_string()) fail(ErrorCode::kValidation, "mode must be a string");
      s.set_mode(parse_mode(m.get<std::string>()));
      return json_response(200, session_json(s));
    }
    if (is("POST", {"clear"})) {
      return json_response(200, {{"type", "cleared"}, {"dirty", rect_json(s.clear_canvas())}});
    }
    if (is("GET", {"export"})) {
      const ExportBundle b = s.export_bundle(query_int(query, "smoothed", 0) != 0);
      return json_response(
          200, {{"csv", b.csv},
                {"metrics", b.metrics_json ? json::parse(*b.metrics_json) : json(nullptr)}});
    }
    if (is("GET", {"export", "strokes.csv"})) {
      const ExportBundle b = s.export_bundle(query_int(query, "smoothed", 0) != 0);
      return {200, "text/csv", b.csv};
    }
    if (is("GET", {"export", "metrics.json"})) {
      if (s.closed()) fail(ErrorCode::kSessionClosed, "session " + id + " is closed");
      return {200, "application/json", s.report().to_json()};
    }
    if (is("GET", {"texture.png"})) {
      if (s.closed()) fail(ErrorCode::kSessionClosed, "session " + id + " is closed");
      const auto png = export_raster(s.layer());
      return {200, "image/png", std::string(png.begin(), png.end())};
    }
    if (is("GET", {"texture", "patch"})) {
      if (s.closed()) fail(ErrorCode::kSessionClosed, "session " + id + " is closed");
      const PixelRect r{query_int(query, "x0", 0), query_int(query, "y0", 0),
                        query_int(query, "x1", s.layer().width() - 1),
                        query_int(query, "y1", s.layer().height() - 1)};
      const auto png = crop_png(s.layer(), r);
      return {200, "image/png", std::string(png.begin(), png.end())};
    }
    fail(ErrorCode::kNotFound, "no route " + std::string(method) + " for this session path");
  });
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kParse:
    case ErrorCode::kArgument:
    case ErrorCode::kUnknownVersion:
      return 400;
    case ErrorCode::kValidation:
    case ErrorCode::kDegenerateStroke:
    case ErrorCode::kInsufficientData:
    case ErrorCode::kEmptyReport:
    case ErrorCode::kStrokePaint:
      return 422;
    case ErrorCode::kModeMismatch:
    case ErrorCode::kInvalidTransition:
    case ErrorCode::kInvalidState:
      return 409;
    case ErrorCode::kSessionClosed:
      return 410;
    case ErrorCode::kConstruction:
    case ErrorCode::kPathNotFound:
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

HttpResponse ProtocolHandler::handle_http(std::string_view method, std::string_view target,
                                          std::string_view body) {
  const auto qpos = target.find('?');
  const std::string_view path = target.substr(0, qpos);
  const std::string_view query = qpos == std::string_view::npos ? "" : target.substr(qpos + 1);
  try {
    const auto seg = split_path(path);
    if (seg.size() == 1 && seg[0] == "health" && method == "GET") {
      return json_response(200, {{"status", "ready"}});
    }
    if (seg.size() == 1 && seg[0] == "sessions") {
      if (method == "POST") {
        const json j = parse_body(body);
        const json& mesh = field(j, "mesh");
        if (!mesh.is_string()) fail(ErrorCode::kValidation, "mesh must be a string");
        const std::string id = service_->create_session(mesh.get<std::string>());
        json out = service_->with_session(id, [](Session& s) { return session_json(s); });
        out["mesh"] = mesh;
        return json_response(201, out);
      }
      if (method == "GET") return json_response(200, {{"sessions", service_->session_ids()}});
    }
    if (seg.size() >= 2 && seg[0] == "meshes" && method == "GET") {
      std::string ref;
      for (std::size_t i = 1; i < seg.size(); ++i) {
        if (i > 1) ref += '/';
        ref += seg[i];
      }
      return {200, "text/plain", service_->mesh_source(ref)};
    }
    if (seg.size() >= 2 && seg[0] == "sessions") return route_session(*service_, method, seg, query, body);
    fail(ErrorCode::kNotFound, "no route " + std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return json_response(http_status(e.code()), error_json(e.code(), e.what()));
  } catch (const std::exception& e) {
    return json_response(500, error_json(ErrorCode::kIo, e.what()));
  }
}

std::optional<std::string> ProtocolHandler::stream_session(std::string_view target) {
  const auto seg = split_path(target.substr(0, target.find('?')));
  if (seg.size() == 3 && seg[0] == "sessions" && seg[2] == "stream") return std::string(seg[1]);
  return std::nullopt;
}

std::string ProtocolHandler::handle_stream_message(const std::string& session_id,
                                                   std::string_view message) {
  try {
    const json msg = parse_body(message);
    const json& type = field(msg, "type");
    if (!type.is_string()) fail(ErrorCode::kValidation, "type must be a string");
    const std::string t = type.get<std::string>();
    return service_->with_session(session_id, [&](Session& s) -> std::string {
      if (t == "samples") return delta_json(s.stream_samples(parse_samples(msg))).dump();
      if (t == "stroke_end") return delta_json(s.end_stroke()).dump();
      if (t == "vectorize") {
        const json& id = field(msg, "stroke_id");
        if (!id.is_number_integer()) fail(ErrorCode::kValidation, "stroke_id must be an integer");
        const PathRecord& rec = s.vectorize_stroke(id.get<std::int64_t>());
        const PixelRect dirty = s.flush_dirty();
        return vectorized_json(rec, dirty, s.mode()).dump();
      }
      if (t == "tapline") return path_delta_json(s.tapline_point(parse_vec3(field(msg, "p"), "p"))).dump();
      if (t == "edit_point") {
        const json& pid = field(msg, "path_id");
        const json& idx = field(msg, "index");
        if (!pid.is_number_integer() || !idx.is_number_unsigned()) {
          fail(ErrorCode::kValidation, "path_id and index must be non-negative integers");
        }
        return path_delta_json(s.edit_point(pid.get<std::int64_t>(), idx.get<std::size_t>(),
                                            parse_vec3(field(msg, "p"), "p")))
            .dump();
      }
      fail(ErrorCode::kValidation, "unknown message type '" + t + "'");
    });
  } catch (const Error& e) {
    return error_json(e.code(), e.what()).dump();
  } catch (const std::exception& e) {
    return error_json(ErrorCode::kIo, e.what()).dump();
  }
}

}  // namespace surfsketch
