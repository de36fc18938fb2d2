#include <surfsketch/error.hpp>
#include <surfsketch/io/csv.hpp>
#include <surfsketch/io/obj.hpp>
#include <surfsketch/io/trace.hpp>
#include <surfsketch/pipeline.hpp>
#include <surfsketch/server.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace surfsketch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

// Input problems the user can fix by changing arguments.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string mesh;
  std::vector<std::string> traces;
  std::string bundle;
  std::string out;
  std::string model_dir;
  std::string host = "127.0.0.1";
  std::string task = "bundle";
  double angle_tol = kDefaultAngleToleranceDeg;
  int subdivisions = kDefaultSubdivisions;
  int layer_size = kDefaultLayerSize;
  int port = 8080;
  bool export_smoothed = false;
};

std::string model_dir(const CliConfig& cfg) {
  if (!cfg.model_dir.empty()) return cfg.model_dir;
  if (const char* env = std::getenv("SURFSKETCH_MODEL_DIR")) return env;
  return ".";
}

fs::path existing_file(const std::string& path, const std::string& what, const CliConfig& cfg) {
  if (path.empty()) throw UsageError("missing " + what);
  fs::path p(path);
  if (!fs::is_regular_file(p) && p.is_relative()) {
    const fs::path alt = fs::path(model_dir(cfg)) / p;
    if (fs::is_regular_file(alt)) p = alt;
  }
  if (!fs::is_regular_file(p)) throw UsageError(what + " not found: " + path);
  return p;
}

std::shared_ptr<const SpatialIndex> load_index(const CliConfig& cfg) {
  const fs::path path = existing_file(cfg.mesh, "mesh", cfg);
  return std::make_shared<const SpatialIndex>(std::make_shared<const Mesh>(io::load_obj(path)));
}

std::vector<io::Trace> load_traces(const CliConfig& cfg) {
  if (cfg.traces.empty()) throw UsageError("missing --trace");
  std::vector<io::Trace> traces;
  for (const std::string& t : cfg.traces) traces.push_back(io::read_trace(existing_file(t, "trace", cfg)));
  return traces;
}

ReplayOptions replay_options(const CliConfig& cfg) {
  ReplayOptions opt;
  opt.vectorize.angle_tol_deg = cfg.angle_tol;
  opt.vectorize.subdivisions = cfg.subdivisions;
  opt.layer_size = cfg.layer_size;
  opt.include_smoothed = cfg.export_smoothed;
  return opt;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

int cmd_replay(const CliConfig& cfg) {
  if (cfg.out.empty()) throw UsageError("missing --out");
  const auto index = load_index(cfg);
  const auto traces = load_traces(cfg);
  const ReplayResult result = replay(index, traces, replay_options(cfg));
  write_bundle(cfg.out, result.bundle);
  std::cout << "replayed " << result.session->strokes().size() << " stroke(s) into " << cfg.out << "\n";
  return kExitOk;
}

// Rebuilds per-stroke metric inputs from an exported CSV. Without smoothed
// rows the path is re-smoothed from its control points.
std::vector<StrokeMetricsInput> inputs_from_bundle(const CliConfig& cfg, const SpatialIndex& index) {
  const fs::path csv_path = existing_file((fs::path(cfg.bundle) / "strokes.csv").string(), "bundle CSV", cfg);
  std::ifstream in(csv_path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  std::map<std::int64_t, io::ExportStroke> strokes;
  for (const io::CsvRow& row : io::parse_stroke_csv(ss.str())) {
    io::ExportStroke& s = strokes[row.stroke_id];
    s.stroke_id = row.stroke_id;
    if (row.kind == "raw") s.raw.push_back(row.position);
    else if (row.kind == "vector") s.vector.push_back(row.position);
    else if (row.kind == "smoothed") s.smoothed.push_back(row.position);
  }
  std::vector<StrokeMetricsInput> inputs;
  for (auto& [id, s] : strokes) {
    if (s.raw.empty() || s.vector.empty()) continue;
    StrokeMetricsInput m;
    m.task_id = cfg.task;
    m.stroke_id = id;
    m.raw = s.raw;
    m.control_points = s.vector;
    if (!s.smoothed.empty()) {
      m.vector_polyline = s.smoothed;
    } else if (s.vector.size() >= 2) {
      VectorChain chain;
      for (const Vec3& p : s.vector) {
        const SurfacePoint sp = index.closest_point(p);
        chain.points.push_back(sp);
        chain.rays.push_back(inward_ray(index.mesh(), sp));
      }
      m.vector_polyline =
          conform_to_surface(index, smooth_catmull_rom(chain, cfg.subdivisions)).polyline();
    } else {
      m.vector_polyline = s.vector;
    }
    inputs.push_back(std::move(m));
  }
  return inputs;
}

int cmd_metrics(const CliConfig& cfg) {
  if (cfg.out.empty()) throw UsageError("missing --out");
  if (cfg.bundle.empty() == cfg.traces.empty()) throw UsageError("give either --bundle or --trace");
  const auto index = load_index(cfg);
  MetricsReport report;
  if (!cfg.bundle.empty()) {
    report = build_report(inputs_from_bundle(cfg, *index), index->mesh().diagonal());
  } else {
    ReplayOptions opt = replay_options(cfg);
    opt.layer_size = std::min(opt.layer_size, 256);  // the raster is not needed here
    report = replay(index, load_traces(cfg), opt).report;
  }
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + cfg.out + ": " + ec.message());
  write_text(fs::path(cfg.out) / "metrics.json", report.to_json());
  std::cout << "metrics for " << report.strokes.size() << " stroke(s) written to " << cfg.out << "\n";
  return kExitOk;
}

int cmd_serve(const CliConfig& cfg) {
  if (cfg.port < 0 || cfg.port > 65535) throw UsageError("port out of range");
  ServiceConfig sc;
  sc.model_dir = model_dir(cfg);
  sc.layer_size = cfg.layer_size;
  sc.vectorize.angle_tol_deg = cfg.angle_tol;
  sc.vectorize.subdivisions = cfg.subdivisions;
  Service service(sc);
  ProtocolHandler handler(service);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(handler, cfg.host, static_cast<unsigned short>(cfg.port));
  std::cout << "listening on http://" << cfg.host << ":" << server.port() << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() only returns after stop(); wake the waiter if it is still blocked.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface stroke sketching and vectorization"};
  app.require_subcommand(1);
  CliConfig cfg;

  const auto add_vector_flags = [&](CLI::App* sub) {
    sub->add_option("--angle-tol", cfg.angle_tol, "path-walk merge tolerance in degrees")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--subdivisions", cfg.subdivisions, "smoothed points inserted per segment")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* replay_cmd = app.add_subcommand("replay", "replay traces and write an export bundle");
  replay_cmd->add_option("--mesh", cfg.mesh, "OBJ mesh")->required();
  replay_cmd->add_option("--trace", cfg.traces, "trace file (repeatable)")->required();
  replay_cmd->add_option("--out", cfg.out, "output directory")->required();
  replay_cmd->add_option("--layer-size", cfg.layer_size, "texture size in pixels")->check(CLI::PositiveNumber);
  replay_cmd->add_flag("--export-smoothed", cfg.export_smoothed, "also export smoothed rows");
  add_vector_flags(replay_cmd);

  CLI::App* metrics_cmd = app.add_subcommand("metrics", "compute a metrics report");
  metrics_cmd->add_option("--mesh", cfg.mesh, "OBJ mesh")->required();
  metrics_cmd->add_option("--trace", cfg.traces, "trace file(s) to replay");
  metrics_cmd->add_option("--bundle", cfg.bundle, "existing export bundle directory");
  metrics_cmd->add_option("--task", cfg.task, "task label for bundle strokes");
  metrics_cmd->add_option("--out", cfg.out, "output directory")->required();
  add_vector_flags(metrics_cmd);

  CLI::App* serve_cmd = app.add_subcommand("serve", "run the HTTP/WebSocket service");
  serve_cmd->add_option("--port", cfg.port, "listen port (0 picks a free one)");
  serve_cmd->add_option("--host", cfg.host, "listen address");
  serve_cmd->add_option("--model-dir", cfg.model_dir, "mesh directory (default $SURFSKETCH_MODEL_DIR or .)");
  serve_cmd->add_option("--layer-size", cfg.layer_size, "texture size in pixels")->check(CLI::PositiveNumber);
  add_vector_flags(serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) return cmd_replay(cfg);
    if (metrics_cmd->parsed()) return cmd_metrics(cfg);
    return cmd_serve(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << error_name(e.code()) << "]: " << e.what() << "\n";
    const bool input = e.code() == ErrorCode::kParse || e.code() == ErrorCode::kUnknownVersion ||
                       e.code() == ErrorCode::kValidation || e.code() == ErrorCode::kNotFound;
    return input ? kExitUsage : kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
}
