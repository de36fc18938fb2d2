#include "expect_error.hpp"
#include "meshes.hpp"

#include <surfsketch/io/csv.hpp>
#include <surfsketch/io/obj.hpp>
#include <surfsketch/protocol.hpp>
#include <surfsketch/service.hpp>
#include <surfsketch/session.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>

using namespace surfsketch;
namespace t = surfsketch::testing;
using nlohmann::json;

namespace {

std::shared_ptr<const SpatialIndex> plane_index() {
  static const auto idx = std::make_shared<const SpatialIndex>(t::share(t::plane(20, 20)));
  return idx;
}

// Straight pinched stroke along x at height 0.3 above the plane.
std::vector<HandSample> line_samples(double y, int n = 12, double t0 = 0.0, bool release = true) {
  std::vector<HandSample> out;
  for (int i = 0; i < n; ++i) {
    HandSample s;
    s.t_ms = t0 + 10.0 * i;
    s.position = Vec3(0.1 + 0.06 * i, y, 0.3);
    s.pinch = true;
    out.push_back(s);
  }
  if (release) {
    HandSample up = out.back();
    up.t_ms += 10.0;
    up.pinch = false;
    out.push_back(up);
  }
  return out;
}

std::size_t painted(const TextureLayer& layer) {
  std::size_t n = 0;
  for (int y = 0; y < layer.height(); ++y) {
    for (int x = 0; x < layer.width(); ++x) n += layer.at(x, y).a > 0;
  }
  return n;
}

std::size_t data_rows(const std::string& csv) { return std::count(csv.begin(), csv.end(), '\n') - 1; }

}  // namespace

TEST(Session, StartsInFreehandWithDefaultBrush) {
  Session s("a", plane_index(), 128);
  EXPECT_EQ(s.mode(), DrawMode::kFreehand);
  EXPECT_EQ(s.brush().radius, BrushSpec{}.radius);
  EXPECT_EQ(painted(s.layer()), 0u);
}

TEST(Session, FallingPinchFinalizesStroke) {
  Session s("a", plane_index(), 128);
  const StreamDelta d = s.stream_samples(line_samples(0.5));
  EXPECT_EQ(d.stroke_id, 1);
  EXPECT_EQ(d.finalized, std::vector<std::int64_t>{1});
  EXPECT_FALSE(d.dirty.empty());
  ASSERT_EQ(s.strokes().size(), 1u);
  EXPECT_TRUE(s.strokes()[0].finalized);
  EXPECT_EQ(s.strokes()[0].raw.samples.size(), 12u);
  for (const StrokePoint& p : d.points) EXPECT_NEAR(p.surface.position.z(), 0.0, 1e-12);
}

TEST(Session, BatchingDoesNotChangeResult) {
  const auto samples = line_samples(0.4, 25);
  Session whole("a", plane_index(), 128);
  whole.stream_samples(samples);
  for (std::size_t batch : {1u, 3u, 8u}) {
    Session split("b", plane_index(), 128);
    for (std::size_t i = 0; i < samples.size(); i += batch) {
      const std::size_t n = std::min(batch, samples.size() - i);
      split.stream_samples(std::span(samples).subspan(i, n));
    }
    const auto& a = whole.strokes()[0].projected.points;
    const auto& b = split.strokes()[0].projected.points;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].surface.position, b[i].surface.position);
    EXPECT_TRUE(std::equal(whole.layer().rgba().begin(), whole.layer().rgba().end(), split.layer().rgba().begin()));
  }
}

TEST(Session, InvalidBatchLeavesStateUntouched) {
  Session s("a", plane_index(), 64);
  auto samples = line_samples(0.5, 5, 0.0, false);
  samples[3].ray_dir = Vec3(0, 0, -2);
  EXPECT_SURF_ERROR(s.stream_samples(samples), ErrorCode::kValidation);
  EXPECT_TRUE(s.strokes().empty());
  samples[3].ray_dir = Vec3(0, 0, -1);
  samples[3].t_ms = -5.0;
  EXPECT_SURF_ERROR(s.stream_samples(samples), ErrorCode::kValidation);
  EXPECT_TRUE(s.strokes().empty());
}

TEST(Session, EndStrokeFinalizes) {
  Session s("a", plane_index(), 64);
  s.stream_samples(line_samples(0.5, 6, 0.0, false));
  EXPECT_FALSE(s.strokes()[0].finalized);
  const StreamDelta d = s.end_stroke();
  EXPECT_EQ(d.finalized, std::vector<std::int64_t>{1});
  EXPECT_TRUE(s.end_stroke().finalized.empty());
}

TEST(Session, VectorizeStraightStrokeGivesTwoControlPoints) {
  Session s("a", plane_index(), 128);
  s.stream_samples(line_samples(0.5));
  const PathRecord& rec = s.vectorize_stroke(1);
  EXPECT_EQ(rec.path.chain.size(), 2u);
  EXPECT_TRUE(rec.path.surface_conforming);
  EXPECT_EQ(rec.source_stroke, 1);
  EXPECT_EQ(s.mode(), DrawMode::kTapline);
  EXPECT_FALSE(s.strokes()[0].visible);
  EXPECT_GT(painted(s.layer()), 0u);
}

TEST(Session, VectorizeIsIdempotent) {
  Session s("a", plane_index(), 128);
  s.stream_samples(line_samples(0.5));
  const PathRecord* first = &s.vectorize_stroke(1);
  const auto before = std::vector<std::uint8_t>(s.layer().rgba().begin(), s.layer().rgba().end());
  s.flush_dirty();
  const PathRecord* second = &s.vectorize_stroke(1);
  EXPECT_EQ(first, second);
  EXPECT_EQ(s.paths().size(), 1u);
  EXPECT_TRUE(s.flush_dirty().empty());
  EXPECT_TRUE(std::equal(before.begin(), before.end(), s.layer().rgba().begin()));
}

TEST(Session, VectorizeErrors) {
  Session s("a", plane_index(), 64);
  EXPECT_SURF_ERROR(s.vectorize_stroke(9), ErrorCode::kNotFound);
  HandSample one;
  one.position = Vec3(0.5, 0.5, 0.2);
  one.pinch = true;
  HandSample up = one;
  up.pinch = false;
  up.t_ms = 1.0;
  s.stream_samples(std::vector<HandSample>{one, up});
  EXPECT_SURF_ERROR(s.vectorize_stroke(1), ErrorCode::kDegenerateStroke);
}

TEST(Session, VectorizeFinishesActiveStroke) {
  Session s("a", plane_index(), 64);
  s.stream_samples(line_samples(0.5, 8, 0.0, false));
  EXPECT_NO_THROW(s.vectorize_stroke(1));
  EXPECT_TRUE(s.strokes()[0].finalized);
}

TEST(Session, ModeStateMachine) {
  Session s("a", plane_index(), 64);
  EXPECT_NO_THROW(s.set_mode(DrawMode::kFreehand));
  EXPECT_SURF_ERROR(s.set_mode(DrawMode::kTapline), ErrorCode::kInvalidTransition);
  EXPECT_SURF_ERROR(s.tapline_point({0.5, 0.5, 0}), ErrorCode::kModeMismatch);
  s.stream_samples(line_samples(0.5));
  s.vectorize_stroke(1);
  EXPECT_EQ(s.mode(), DrawMode::kTapline);
  EXPECT_SURF_ERROR(s.stream_samples(line_samples(0.2, 4, 500.0)), ErrorCode::kModeMismatch);
  EXPECT_NO_THROW(s.set_mode(DrawMode::kTapline));
  s.set_mode(DrawMode::kFreehand);
  EXPECT_EQ(s.mode(), DrawMode::kFreehand);
  EXPECT_NO_THROW(s.stream_samples(line_samples(0.2, 4, 500.0)));
  EXPECT_SURF_ERROR(parse_mode("spray"), ErrorCode::kArgument);
}

TEST(Session, TaplinePendingThenPath) {
  Session s("a", plane_index(), 128);
  s.stream_samples(line_samples(0.5));
  s.vectorize_stroke(1);
  const PathDelta first = s.tapline_point({0.2, 0.2, 0.1});
  EXPECT_EQ(first.path_id, 0);
  ASSERT_TRUE(first.pending);
  EXPECT_NEAR(first.pending->position.z(), 0.0, 1e-12);
  const PathDelta second = s.tapline_point({0.8, 0.2, 0.1});
  ASSERT_NE(second.record, nullptr);
  EXPECT_GT(second.path_id, 1);
  EXPECT_EQ(second.record->path.chain.size(), 2u);
  EXPECT_FALSE(second.record->source_stroke);
  const PathDelta third = s.tapline_point({0.8, 0.8, 0.1});
  EXPECT_EQ(third.path_id, second.path_id);
  EXPECT_EQ(third.record->path.chain.size(), 3u);
  EXPECT_EQ(s.paths().size(), 2u);
}

TEST(Session, EditPointPassesThroughNewPosition) {
  Session s("a", plane_index(), 128);
  auto samples = line_samples(0.5, 12, 0.0, false);
  for (int i = 0; i < 12; ++i) samples.push_back({200.0 + 10 * i, Vec3(0.76, 0.5 + 0.03 * (i + 1), 0.3), Vec3(0, 0, -1), true});
  s.stream_samples(samples);
  const PathRecord& rec = s.vectorize_stroke(1);
  ASSERT_EQ(rec.path.chain.size(), 3u);
  const PathDelta d = s.edit_point(1, 1, {0.7, 0.45, 0.2});
  ASSERT_NE(d.record, nullptr);
  const auto poly = d.record->path.polyline();
  EXPECT_TRUE(std::any_of(poly.begin(), poly.end(), [](const Vec3& p) { return (p - Vec3(0.7, 0.45, 0)).norm() < 1e-9; }));
  EXPECT_FALSE(d.dirty.empty());
  EXPECT_SURF_ERROR(s.edit_point(1, 3, {0.5, 0.5, 0}), ErrorCode::kArgument);
  EXPECT_SURF_ERROR(s.edit_point(42, 0, {0.5, 0.5, 0}), ErrorCode::kNotFound);
}

TEST(Session, BrushAppliesToLaterStrokes) {
  Session s("a", plane_index(), 256);
  s.set_brush({0.02, Rgba{255, 0, 0, 255}});
  s.stream_samples(line_samples(0.5));
  EXPECT_EQ(s.strokes()[0].raw.brush_radius, 0.02);
  EXPECT_EQ(s.layer().at(static_cast<int>(0.4 * 256), static_cast<int>(0.5 * 256)), (Rgba{255, 0, 0, 255}));
  EXPECT_SURF_ERROR(s.set_brush({0.0, Rgba{}}), ErrorCode::kArgument);
}

TEST(Session, ClearKeepsHistory) {
  Session s("a", plane_index(), 128);
  s.stream_samples(line_samples(0.5));
  s.stream_samples(line_samples(0.3, 12, 300.0));
  const PixelRect dirty = s.clear_canvas();
  EXPECT_FALSE(dirty.empty());
  EXPECT_EQ(painted(s.layer()), 0u);
  EXPECT_EQ(s.strokes().size(), 2u);
  EXPECT_EQ(data_rows(s.export_bundle().csv), 24u);
}

TEST(Session, ExportRowsMatchPointCounts) {
  Session s("a", plane_index(), 128);
  EXPECT_SURF_ERROR(s.export_bundle(), ErrorCode::kArgument);
  s.stream_samples(line_samples(0.5));
  s.stream_samples(line_samples(0.3, 9, 300.0));
  ExportBundle b = s.export_bundle();
  EXPECT_EQ(data_rows(b.csv), 12u + 9u);
  EXPECT_FALSE(b.metrics_json);
  EXPECT_SURF_ERROR(s.report(), ErrorCode::kEmptyReport);
  s.vectorize_stroke(2);
  b = s.export_bundle();
  EXPECT_EQ(data_rows(b.csv), 12u + 9u + 2u);
  ASSERT_TRUE(b.metrics_json);
  EXPECT_EQ(json::parse(*b.metrics_json)["stroke_count"], 1);
  const TextureLayer img = import_raster(b.texture_png);
  EXPECT_TRUE(std::equal(img.rgba().begin(), img.rgba().end(), s.layer().rgba().begin()));
  EXPECT_EQ(s.export_bundle().csv, b.csv);
  EXPECT_GT(data_rows(s.export_bundle(true).csv), data_rows(b.csv));
}

TEST(Session, ClosedSessionRejectsCommands) {
  Session s("a", plane_index(), 64);
  s.close();
  EXPECT_SURF_ERROR(s.stream_samples(line_samples(0.5)), ErrorCode::kSessionClosed);
  EXPECT_SURF_ERROR(s.end_stroke(), ErrorCode::kSessionClosed);
  EXPECT_SURF_ERROR(s.vectorize_stroke(1), ErrorCode::kSessionClosed);
  EXPECT_SURF_ERROR(s.export_bundle(), ErrorCode::kSessionClosed);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / ("surfsketch_service_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_ / "models");
    std::ofstream(dir_ / "models" / "plane.obj") << io::write_obj(t::plane(10, 10));
    ServiceConfig cfg;
    cfg.model_dir = dir_ / "models";
    cfg.layer_size = 128;
    service_ = std::make_unique<Service>(cfg);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  std::unique_ptr<Service> service_;
};

TEST_F(ServiceTest, SessionsShareOneIndex) {
  const std::string a = service_->create_session("plane.obj");
  const std::string b = service_->create_session("plane.obj");
  EXPECT_NE(a, b);
  const SpatialIndex* ia = service_->with_session(a, [](Session& s) { return &s.index(); });
  const SpatialIndex* ib = service_->with_session(b, [](Session& s) { return &s.index(); });
  EXPECT_EQ(ia, ib);
  service_->with_session(a, [](Session& s) { s.stream_samples(line_samples(0.5)); });
  EXPECT_EQ(service_->with_session(b, [](Session& s) { return s.strokes().size(); }), 0u);
  EXPECT_EQ(service_->session_ids().size(), 2u);
}

TEST_F(ServiceTest, UnknownAndEscapingMeshesAreNotFound) {
  EXPECT_SURF_ERROR(service_->create_session("missing.obj"), ErrorCode::kNotFound);
  EXPECT_SURF_ERROR(service_->create_session("../models/plane.obj"), ErrorCode::kNotFound);
  EXPECT_SURF_ERROR(service_->create_session((dir_ / "models" / "plane.obj").string()), ErrorCode::kNotFound);
  EXPECT_SURF_ERROR(service_->with_session("nope", [](Session&) {}), ErrorCode::kNotFound);
}

TEST_F(ServiceTest, RegisteredMeshNeedsNoFile) {
  service_->register_mesh("mem/sphere", t::share(t::uv_sphere(1.0, 12, 6)));
  const std::string id = service_->create_session("mem/sphere");
  EXPECT_EQ(service_->with_session(id, [](Session& s) { return s.index().mesh().face_count(); }), 2u * 12 * 5);
  EXPECT_EQ(io::parse_obj(service_->mesh_source("mem/sphere")).face_count(), 2u * 12 * 5);
}

TEST_F(ServiceTest, CloseTwiceIsAnError) {
  const std::string id = service_->create_session("plane.obj");
  service_->close_session(id);
  EXPECT_SURF_ERROR(service_->close_session(id), ErrorCode::kSessionClosed);
}

namespace {

json body(const HttpResponse& r) { return json::parse(r.body); }

json sample_json(const HandSample& s) {
  return {{"t", s.t_ms}, {"p", {s.position.x(), s.position.y(), s.position.z()}},
          {"ray", {s.ray_dir.x(), s.ray_dir.y(), s.ray_dir.z()}}, {"pinch", s.pinch}};
}

json samples_msg(const std::vector<HandSample>& samples) {
  json arr = json::array();
  for (const HandSample& s : samples) arr.push_back(sample_json(s));
  return {{"type", "samples"}, {"samples", arr}};
}

}  // namespace

TEST_F(ServiceTest, HttpFlow) {
  ProtocolHandler h(*service_);
  EXPECT_EQ(body(h.handle_http("GET", "/health", ""))["status"], "ready");

  const HttpResponse created = h.handle_http("POST", "/sessions", R"({"mesh":"plane.obj"})");
  ASSERT_EQ(created.status, 201) << created.body;
  const std::string id = body(created)["session_id"];
  EXPECT_EQ(body(created)["mode"], "freehand");
  const std::string base = "/sessions/" + id;

  const HttpResponse streamed = h.handle_http("POST", base + "/samples", samples_msg(line_samples(0.5)).dump());
  ASSERT_EQ(streamed.status, 200) << streamed.body;
  const json delta = body(streamed);
  EXPECT_EQ(delta["type"], "projected_delta");
  EXPECT_EQ(delta["finalized"], json::array({1}));
  EXPECT_TRUE(delta["dirty"].is_object());

  const HttpResponse vec = h.handle_http("POST", base + "/strokes/1/vectorize", "");
  ASSERT_EQ(vec.status, 200) << vec.body;
  EXPECT_EQ(body(vec)["type"], "vectorized");
  EXPECT_EQ(body(vec)["mode"], "tapline");
  EXPECT_EQ(body(vec)["path"]["control_points"].size(), 2u);

  const HttpResponse edit = h.handle_http("POST", base + "/paths/1/points/1", R"({"p":[0.76,0.6,0]})");
  ASSERT_EQ(edit.status, 200) << edit.body;
  EXPECT_EQ(body(edit)["type"], "path_delta");

  const HttpResponse csv = h.handle_http("GET", base + "/export/strokes.csv", "");
  EXPECT_EQ(csv.content_type, "text/csv");
  EXPECT_EQ(data_rows(csv.body), 12u + 2u);
  EXPECT_GT(data_rows(h.handle_http("GET", base + "/export/strokes.csv?smoothed=1", "").body), 14u);
  EXPECT_EQ(body(h.handle_http("GET", base + "/export/metrics.json", ""))["stroke_count"], 1);

  const HttpResponse png = h.handle_http("GET", base + "/texture.png", "");
  EXPECT_EQ(png.content_type, "image/png");
  EXPECT_EQ(import_raster(std::vector<std::uint8_t>(png.body.begin(), png.body.end())).width(), 128);
  const HttpResponse patch = h.handle_http("GET", base + "/texture/patch?x0=10&y0=20&x1=19&y1=24", "");
  EXPECT_EQ(import_raster(std::vector<std::uint8_t>(patch.body.begin(), patch.body.end())).height(), 5);

  EXPECT_EQ(h.handle_http("POST", base + "/mode", R"({"mode":"freehand"})").status, 200);
  EXPECT_EQ(h.handle_http("POST", base + "/brush", R"({"radius":0.02,"color":[0,0,255,255]})").status, 200);
  EXPECT_EQ(body(h.handle_http("GET", base, ""))["brush"]["radius"], 0.02);
  EXPECT_EQ(body(h.handle_http("POST", base + "/clear", ""))["type"], "cleared");
  EXPECT_EQ(h.handle_http("GET", "/meshes/plane.obj", "").status, 200);
  EXPECT_EQ(h.handle_http("DELETE", base, "").status, 200);
  EXPECT_EQ(h.handle_http("GET", base, "").status, 410);
}

TEST_F(ServiceTest, HttpErrorStatuses) {
  ProtocolHandler h(*service_);
  const auto expect = [&](const HttpResponse& r, int status, const char* name) {
    EXPECT_EQ(r.status, status) << r.body;
    EXPECT_EQ(body(r)["type"], "error");
    EXPECT_EQ(body(r)["error"], name);
  };
  expect(h.handle_http("GET", "/nowhere", ""), 404, "not_found");
  expect(h.handle_http("POST", "/sessions", R"({"mesh":"missing.obj"})"), 404, "not_found");
  expect(h.handle_http("POST", "/sessions", "{oops"), 400, "parse_error");
  expect(h.handle_http("POST", "/sessions", R"({"mesh":3})"), 422, "validation_error");
  const std::string id = body(h.handle_http("POST", "/sessions", R"({"mesh":"plane.obj"})"))["session_id"];
  const std::string base = "/sessions/" + id;
  expect(h.handle_http("POST", base + "/strokes/5/vectorize", ""), 404, "not_found");
  expect(h.handle_http("POST", base + "/mode", R"({"mode":"tapline"})"), 409, "invalid_transition");
  expect(h.handle_http("POST", base + "/tapline", R"({"p":[0,0,0]})"), 409, "mode_mismatch");
  expect(h.handle_http("GET", base + "/export/metrics.json", ""), 422, "empty_report");
  expect(h.handle_http("POST", base + "/samples", R"({"samples":[{"t":0,"p":[0,0,1],"ray":[0,0,0]}]})"), 422,
         "validation_error");
  EXPECT_EQ(http_status(ErrorCode::kSessionClosed), 410);
  EXPECT_EQ(http_status(ErrorCode::kIo), 500);
}

TEST_F(ServiceTest, StreamMessages) {
  ProtocolHandler h(*service_);
  const std::string id = service_->create_session("plane.obj");
  EXPECT_EQ(ProtocolHandler::stream_session("/sessions/" + id + "/stream?x=1"), id);
  EXPECT_FALSE(ProtocolHandler::stream_session("/sessions/" + id));

  const auto samples = line_samples(0.5, 12, 0.0, false);
  const json d1 = json::parse(h.handle_stream_message(id, samples_msg({samples.begin(), samples.begin() + 6}).dump()));
  EXPECT_EQ(d1["type"], "projected_delta");
  EXPECT_EQ(d1["stroke_id"], 1);
  EXPECT_TRUE(d1["finalized"].empty());
  h.handle_stream_message(id, samples_msg({samples.begin() + 6, samples.end()}).dump());
  const json end = json::parse(h.handle_stream_message(id, R"({"type":"stroke_end"})"));
  EXPECT_EQ(end["finalized"], json::array({1}));

  const json vec = json::parse(h.handle_stream_message(id, R"({"type":"vectorize","stroke_id":1})"));
  EXPECT_EQ(vec["type"], "vectorized");
  const json tap = json::parse(h.handle_stream_message(id, R"({"type":"tapline","p":[0.1,0.1,0.5]})"));
  EXPECT_EQ(tap["type"], "path_delta");
  EXPECT_TRUE(tap["path"].is_null());
  EXPECT_TRUE(tap["pending"].is_object());
  const json edit =
      json::parse(h.handle_stream_message(id, R"({"type":"edit_point","path_id":1,"index":0,"p":[0.2,0.5,0]})"));
  EXPECT_EQ(edit["path"]["control_points"][0][0], 0.2);

  const auto err = [&](std::string_view msg) { return json::parse(h.handle_stream_message(id, msg)); };
  EXPECT_EQ(err(samples_msg(samples).dump())["error"], "mode_mismatch");
  EXPECT_EQ(err(R"({"type":"bogus"})")["error"], "validation_error");
  EXPECT_EQ(err("not json")["error"], "parse_error");
  EXPECT_EQ(err(R"({"type":"vectorize","stroke_id":"1"})")["error"], "validation_error");
  EXPECT_EQ(json::parse(h.handle_stream_message("zzz", R"({"type":"stroke_end"})"))["error"], "not_found");
  service_->close_session(id);
  EXPECT_EQ(err(R"({"type":"stroke_end"})")["error"], "session_closed");
}
