// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "fixtures.hpp"
#include "meshes.hpp"
#include "oracles.hpp"

#include <surfsketch/io/obj.hpp>
#include <surfsketch/io/trace.hpp>
#include <surfsketch/pipeline.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace surfsketch;
namespace t = surfsketch::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = SURFSKETCH_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const SpatialIndex> rock_index() {
  static const auto idx =
      std::make_shared<const SpatialIndex>(std::make_shared<const Mesh>(io::load_obj(kData / "rock.obj")));
  return idx;
}

Outcome catmull_rom_interpolation() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 p[4];
    for (Vec3& q : p) q = Vec3(u(rng), u(rng), u(rng));
    worst = std::max(worst, (catmull_rom(p[0], p[1], p[2], p[3], 0.0) - p[1]).norm());
    worst = std::max(worst, (catmull_rom(p[0], p[1], p[2], p[3], 1.0) - p[2]).norm());
  }
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(1, 1, 0), d(0, 1, 0);
  const Vec3 mid = catmull_rom(a, b, c, d, 0.5);
  const double example_err = std::max((mid - Vec3(1.125, 0.5, 0)).norm(), (mid - oracle::catmull_rom(a, b, c, d, 0.5)).norm());
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && example_err <= 1e-12 && elapsed < 1.0,
          fmt("endpoint err %.2e, example (%.6f, %.6f, %.6f), %.3f s", worst, mid.x(), mid.y(), mid.z(), elapsed)};
}

Outcome mimicry_planar_equivalence() {
  const SpatialIndex idx(t::share(t::plane(40, 40, 4.0, 4.0)));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  std::size_t points = 0;
  for (int s = 0; s < 20; ++s) {
    RawStroke stroke;
    Vec3 p(1.0 + 2.0 * (s % 5) / 5.0, 1.0 + 0.1 * s, 0.5);
    for (int i = 0; i < 200; ++i) {
      HandSample h;
      h.t_ms = 11.0 * i;
      h.position = p;
      h.pinch = true;
      stroke.samples.push_back(h);
      p += Vec3(0.004 * n(rng), 0.004 * n(rng), 0.01 * n(rng));
      p.z() = std::max(p.z(), 0.05);
    }
    const ProjectedStroke ps = project_mimicry(idx, stroke);
    for (const StrokePoint& q : ps.points) {
      const Vec3 want = stroke.samples[q.source_index].position.cwiseProduct(Vec3(1, 1, 0));
      worst = std::max(worst, (q.surface.position - want).norm());
      ++points;
    }
  }
  return {worst < 1e-6, fmt("max per-point error %.2e m over %zu points", worst, points)};
}

Outcome closest_point_oracle() {
  const auto t0 = Clock::now();
  const auto mesh = t::share(t::uv_sphere(1.0, 100, 50));
  const SpatialIndex idx(mesh);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const double got = (idx.closest_point(p).position - p).norm();
    worst = std::max(worst, std::abs(got - oracle::closest_point(*mesh, p).distance));
  }
  const double elapsed = seconds_since(t0);
  return {mesh->face_count() <= 10000 && worst < 1e-9 && elapsed < 5.0,
          fmt("%zu faces, max distance diff %.2e m, %.2f s", mesh->face_count(), worst, elapsed)};
}

Outcome gap_bridging_continuity() {
  const auto index = rock_index();
  const Mesh& mesh = index->mesh();
  const io::Trace trace = io::read_trace(kData / "rapid.trace");
  double worst_ratio = 0.0, worst_raw_ratio = 0.0;
  int worst_components = 0;
  for (const RawStroke& s : trace.strokes) {
    const ProjectedStroke raw = project_mimicry(*index, s);
    const ProjectedStroke ps = bridge_gaps(*index, raw);
    for (std::size_t i = 1; i < raw.points.size(); ++i) {
      worst_raw_ratio = std::max(worst_raw_ratio,
                                 (raw.points[i].surface.position - raw.points[i - 1].surface.position).norm() / s.brush_radius);
    }
    for (std::size_t i = 1; i < ps.points.size(); ++i) {
      worst_ratio = std::max(worst_ratio,
                             (ps.points[i].surface.position - ps.points[i - 1].surface.position).norm() / s.brush_radius);
    }
    TextureLayer layer(kDefaultLayerSize, kDefaultLayerSize);
    paint_stroke(layer, mesh, ps, BrushSpec{s.brush_radius, s.color});
    worst_components = std::max(worst_components, oracle::painted_components(layer));
  }
  return {worst_ratio <= 1.0 && worst_components == 1 && !trace.strokes.empty(),
          fmt("%zu strokes, raw gap up to %.1fx brush, bridged gap up to %.2fx, components per stroke <= %d",
              trace.strokes.size(), worst_raw_ratio, worst_ratio, worst_components)};
}

struct TaskStats {
  std::vector<double> before, after, deviation;
  std::vector<double> reduction;
  double min_reduction = 100.0;
  bool every_stroke_smoother = true;
  double duration_s = 0.0;
  double rate_hz = 0.0;
  std::size_t strokes = 0;
};

std::map<std::string, TaskStats> replay_tasks(double* elapsed) {
  const auto index = rock_index();
  const auto t0 = Clock::now();
  std::map<std::string, TaskStats> tasks;
  for (const char* name : {"task1.trace", "task2.trace"}) {
    const std::vector<io::Trace> traces = {io::read_trace(kData / name)};
    ReplayOptions opt;
    opt.layer_size = 256;
    const ReplayResult r = replay(index, traces, opt);
    TaskStats& ts = tasks[traces[0].header.task];
    for (const StrokeRecord& s : r.session->strokes()) {
      const PathRecord& p = r.session->path(*s.path_id);
      std::vector<Vec3> raw;
      for (const SurfacePoint& q : s.projected.sample_points()) raw.push_back(q.position);
      const std::vector<Vec3> poly = p.path.polyline();
      const auto b = oracle::turn_angles_deg(raw);
      const auto a = oracle::turn_angles_deg(poly);
      ts.before.insert(ts.before.end(), b.begin(), b.end());
      ts.after.insert(ts.after.end(), a.begin(), a.end());
      ts.every_stroke_smoother &= oracle::mean(a) < oracle::mean(b) && oracle::population_std(a) < oracle::population_std(b);
      for (const Vec3& q : raw) {
        double best = INFINITY;
        for (std::size_t i = 1; i < poly.size(); ++i) best = std::min(best, oracle::point_segment_distance(q, poly[i - 1], poly[i]));
        ts.deviation.push_back(best);
      }
      // Row widths vary with sign and magnitude, so count the bytes directly.
      std::size_t raw_bytes = 0, vec_bytes = 0;
      for (const Vec3& q : raw) raw_bytes += fmt("%.6f,%.6f,%.6f\n", q.x(), q.y(), q.z()).size();
      for (const SurfacePoint& c : p.path.chain.points) {
        vec_bytes += fmt("%.6f,%.6f,%.6f\n", c.position.x(), c.position.y(), c.position.z()).size();
      }
      const double red = 100.0 * (1.0 - static_cast<double>(vec_bytes) / raw_bytes);
      ts.reduction.push_back(red);
      ts.min_reduction = std::min(ts.min_reduction, red);
      const auto& samples = s.raw.samples;
      const double dur = (samples.back().t_ms - samples.front().t_ms) / 1000.0;
      ts.duration_s = ts.strokes ? std::min(ts.duration_s, dur) : dur;
      const double rate = (samples.size() - 1) / dur;
      ts.rate_hz = ts.strokes ? std::min(ts.rate_hz, rate) : rate;
      ++ts.strokes;
    }
  }
  *elapsed = seconds_since(t0);
  return tasks;
}

Outcome smoothness(const std::map<std::string, TaskStats>& tasks, double elapsed) {
  bool ok = elapsed < 10.0;
  std::ostringstream os;
  for (const auto& [task, ts] : tasks) {
    const double mb = oracle::mean(ts.before), ma = oracle::mean(ts.after);
    const double sb = oracle::population_std(ts.before), sa = oracle::population_std(ts.after);
    ok &= ma < mb && sa < sb && ts.every_stroke_smoother;
    os << fmt("%s mean %.3f->%.3f deg std %.3f->%.3f deg%s; ", task.c_str(), mb, ma, sb, sa,
              ts.every_stroke_smoother ? "" : " (a stroke regressed)");
  }
  os << fmt("%.2f s", elapsed);
  return {ok && tasks.size() == 2, os.str()};
}

Outcome deviation(const std::map<std::string, TaskStats>& tasks) {
  const double diag = rock_index()->mesh().diagonal();
  bool ok = std::abs(diag - 2.36) < 0.01;
  std::ostringstream os;
  os << fmt("diagonal %.3f m; ", diag);
  for (const auto& [task, ts] : tasks) {
    const double mean = oracle::mean(ts.deviation);
    const double max = *std::max_element(ts.deviation.begin(), ts.deviation.end());
    ok &= mean <= 0.12 && max <= 0.5;
    os << fmt("%s mean %.5f m max %.5f m; ", task.c_str(), mean, max);
  }
  std::string s = os.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

Outcome size_reduction(const std::map<std::string, TaskStats>& tasks) {
  bool ok = true;
  std::ostringstream os;
  for (const auto& [task, ts] : tasks) {
    const double mean = oracle::mean(ts.reduction);
    ok &= ts.rate_hz >= 60.0 && ts.duration_s >= 3.0 && ts.min_reduction >= 80.0;
    os << fmt("%s %.0f Hz, >= %.1f s, mean %.1f%% (min %.1f%%); ", task.c_str(), ts.rate_hz, ts.duration_s, mean,
              ts.min_reduction);
  }
  std::string s = os.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

std::string read_file(const fs::path& p) {
  std::FILE* f = std::fopen(p.c_str(), "rb");
  if (!f) return {};
  std::string out;
  char buf[65536];
  while (const std::size_t n = std::fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  std::fclose(f);
  return out;
}

Outcome determinism() {
  const auto index = rock_index();
  const std::vector<io::Trace> traces = {io::read_trace(kData / "task1.trace"), io::read_trace(kData / "task2.trace")};
  const fs::path root = fs::temp_directory_path() / ("surfsketch_accept_" + std::to_string(::getpid()));
  std::string bundles[2];
  std::size_t bytes = 0;
  for (int run = 0; run < 2; ++run) {
    const ReplayResult r = replay(index, traces);
    const fs::path dir = root / std::to_string(run);
    write_bundle(dir, r.bundle);
    for (const char* f : {"strokes.csv", "texture.png", "metrics.json"}) bundles[run] += read_file(dir / f) + '\0';
    bytes = bundles[run].size();
  }
  fs::remove_all(root);
  return {bundles[0] == bundles[1] && bytes > 3, fmt("two replays, %zu bundle bytes each, identical: %s", bytes,
                                                       bundles[0] == bundles[1] ? "yes" : "no")};
}

Outcome streaming_latency() {
  const fixtures::Rock rock(288, 174);
  const auto index = std::make_shared<const SpatialIndex>(std::make_shared<const Mesh>(rock.mesh()));
  const io::Trace trace = io::read_trace(kData / "task1.trace");
  Session session("latency", index);
  std::vector<double> ms;
  for (const RawStroke& s : trace.strokes) {
    std::vector<HandSample> samples = s.samples;
    samples.back().pinch = false;
    for (std::size_t i = 0; i + 32 <= samples.size(); i += 32) {
      const auto t0 = Clock::now();
      session.stream_samples(std::span(samples).subspan(i, 32));
      ms.push_back(1000.0 * seconds_since(t0));
    }
    session.end_stroke();
  }
  std::sort(ms.begin(), ms.end());
  const double p95 = ms[static_cast<std::size_t>(0.95 * (ms.size() - 1))];
  return {index->mesh().face_count() >= 100000 && p95 < 16.0,
          fmt("%zu faces, %zu batches of 32, p50 %.2f ms, p95 %.2f ms, max %.2f ms", index->mesh().face_count(),
              ms.size(), ms[ms.size() / 2], p95, ms.back())};
}

Outcome path_walk_properties() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto chain = [](const std::vector<Vec3>& pts) {
    VectorChain c;
    for (const Vec3& p : pts) {
      SurfacePoint sp;
      sp.position = p;
      c.points.push_back(sp);
      c.rays.push_back(Vec3(0, 0, -1));
    }
    return c;
  };
  int collinear_fail = 0, fixpoint_fail = 0, corner_fail = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 a(n(rng), n(rng), n(rng)), dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    std::vector<Vec3> line;
    double s = 0.0;
    for (int i = 0; i < 3 + trial % 50; ++i) line.push_back(a + (s += 0.01 + std::abs(n(rng))) * dir);
    collinear_fail += path_walk(chain(line), 2.0).size() != 2;

    std::vector<Vec3> wander;
    Vec3 p = a;
    double heading = 0.0;
    for (int i = 0; i < 80; ++i) {
      wander.push_back(p);
      heading += 0.05 * n(rng);
      p += Vec3(std::cos(heading), std::sin(heading), 0.02 * n(rng));
    }
    const VectorChain once = path_walk(chain(wander), 2.0);
    const VectorChain twice = path_walk(once, 2.0);
    bool same = once.size() == twice.size();
    for (std::size_t i = 0; same && i < once.size(); ++i) same = once.points[i].position == twice.points[i].position;
    fixpoint_fail += !same;

    const Vec3 side = dir.cross(Vec3(n(rng), n(rng), n(rng))).normalized();
    corner_fail += path_walk(chain({a, a + dir, a + dir + side}), 2.0).size() != 3;
  }
  return {collinear_fail + fixpoint_fail + corner_fail == 0,
          fmt("500 trials: collinear->2 failures %d, fixpoint failures %d, right-angle losses %d", collinear_fail,
              fixpoint_fail, corner_fail)};
}

}  // namespace

int main() {
  double replay_s = 0.0;
  const auto tasks = replay_tasks(&replay_s);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Catmull-Rom interpolation", catmull_rom_interpolation},
      {"Mimicry planar equivalence", mimicry_planar_equivalence},
      {"Closest-point oracle", closest_point_oracle},
      {"Gap bridging continuity", gap_bridging_continuity},
      {"Smoothness improvement", [&] { return smoothness(tasks, replay_s); }},
      {"Deviation regime", [&] { return deviation(tasks); }},
      {"Size reduction regime", [&] { return size_reduction(tasks); }},
      {"Determinism", determinism},
      {"Streaming latency", streaming_latency},
      {"Path-walk properties", path_walk_properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
