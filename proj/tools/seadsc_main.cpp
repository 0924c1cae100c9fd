// Command-line front end for the scene-change detection pipeline:
// train-codebook -> encode -> detect -> evaluate, plus a score-pair probe.
//
// Exit codes: 0 success, 1 internal error, 2 user/input error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "seadsc/detector.hpp"
#include "seadsc/error.hpp"
#include "seadsc/evaluation.hpp"
#include "seadsc/io.hpp"
#include "seadsc/pipeline.hpp"
#include "seadsc/quantizer.hpp"
#include "seadsc/version.hpp"

namespace fs = std::filesystem;
using namespace seadsc;

namespace {

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Parses "AxB" (e.g. a 5x5 grid or a 4x4 patch); both parts must be positive.
std::pair<int, int> parse_dims(const std::string& text, const std::string& what) {
  const std::size_t sep = text.find('x');
  try {
    if (sep == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_a = 0, used_b = 0;
    const int a = std::stoi(text.substr(0, sep), &used_a);
    const int b = std::stoi(text.substr(sep + 1), &used_b);
    if (used_a != sep || used_b != text.size() - sep - 1 || a < 1 || b < 1) {
      throw std::invalid_argument(text);
    }
    return {a, b};
  } catch (const std::exception&) {
    throw ConfigError(what + " must look like 4x4, got '" + text + "'");
  }
}

/// Worker count for encode: hardware concurrency, capped by SEADSC_THREADS.
std::size_t max_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SEADSC_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw ConfigError("SEADSC_THREADS must be a positive integer, got '" + std::string(env) +
                        "'");
    }
    n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

Frame load_frame(const fs::path& path, bool resize, int target_w, int target_h) {
  Frame frame = read_frame(path);
  if (resize) frame = resize_pad(frame, target_w, target_h, 3);
  return frame;
}

// ---- train-codebook --------------------------------------------------------

struct TrainArgs {
  std::string frames_dir;
  std::string patch = "4x4";
  int codebook_size = 512;
  std::uint64_t seed = 42;
  int max_iters = 100;
  double rel_tol = 1e-6;
  std::string resize;
  std::string out;
};

void run_train(const TrainArgs& args) {
  const auto [patch_h, patch_w] = parse_dims(args.patch, "--patch");
  std::pair<int, int> target{0, 0};
  if (!args.resize.empty()) target = parse_dims(args.resize, "--resize");

  const auto paths = list_frames(args.frames_dir);
  if (paths.empty()) throw DataError("no .pgm/.ppm frames in " + args.frames_dir);

  EncoderConfig encoder{patch_h, patch_w};
  std::vector<double> vectors;
  std::size_t dim = 0;
  for (const fs::path& path : paths) {
    const Frame frame = load_frame(path, !args.resize.empty(), target.first, target.second);
    const FeatureGrid features = extract_features(frame, encoder);
    if (dim == 0) {
      dim = features.dim;
      vectors.reserve(features.values.size() * paths.size());
    } else if (features.dim != dim) {
      throw DataError(path.string() + ": feature dim " + std::to_string(features.dim) +
                      " differs from earlier frames (" + std::to_string(dim) + ")");
    }
    vectors.insert(vectors.end(), features.values.begin(), features.values.end());
  }

  TrainResult result =
      train_codebook(vectors, dim, static_cast<std::size_t>(args.codebook_size), args.seed,
                     args.max_iters, args.rel_tol);
  for (std::size_t i = 0; i < result.distortion_trace.size(); ++i) {
    std::cout << "pass " << i << ": distortion " << format_score(result.distortion_trace[i])
              << "\n";
  }
  write_codebook(args.out, result.codebook);
  std::cout << "trained " << result.codebook.n_entries << "x" << result.codebook.dim
            << " codebook on " << vectors.size() / dim << " patch vectors from " << paths.size()
            << " frames -> " << args.out << "\n";
}

// ---- encode -----------------------------------------------------------------

struct EncodeArgs {
  std::string frames_dir;
  std::string codebook;
  std::string out_dir;
  std::string patch = "4x4";
  std::string resize;
};

void run_encode(const EncodeArgs& args) {
  const auto [patch_h, patch_w] = parse_dims(args.patch, "--patch");
  std::pair<int, int> target{0, 0};
  if (!args.resize.empty()) target = parse_dims(args.resize, "--resize");

  const Codebook codebook = read_codebook(args.codebook);
  const auto paths = list_frames(args.frames_dir);
  if (paths.empty()) throw DataError("no .pgm/.ppm frames in " + args.frames_dir);
  fs::create_directories(args.out_dir);

  const EncoderConfig encoder{patch_h, patch_w};
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) return;
      try {
        const Frame frame = load_frame(paths[i], !args.resize.empty(), target.first, target.second);
        const FeatureGrid features = extract_features(frame, encoder);
        if (features.dim != codebook.dim) {
          throw DataError(paths[i].string() + ": patch dim " + std::to_string(features.dim) +
                          " does not match codebook dim " + std::to_string(codebook.dim));
        }
        const CodeIndexMap map = quantize(features, codebook);
        const fs::path out = fs::path(args.out_dir) / (paths[i].stem().string() + ".sdcm");
        write_code_map(out, map, static_cast<std::uint32_t>(codebook.n_entries));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const std::size_t n_threads = std::min(max_threads(), paths.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::cout << "encoded " << paths.size() << " frames -> " << args.out_dir << "\n";
}

// ---- detect -----------------------------------------------------------------

struct DetectArgs {
  std::string maps_dir;
  double window_sec = 10.0;
  int window_frames = 0;  // overrides --window-sec when set
  double fps = 12.0;
  int skip = 4;
  std::string grid = "5x5";
  int n_top = 5;
  int delta_sim = 2;
  int stride_frames = 0;  // defaults to the window length
  std::uint64_t seed = 42;
  int max_iters = 100;
  double rel_tol = 1e-6;
  bool standardize = false;
  std::string out = "pred.json";
  std::string plot_csv;
};

/// Keeps recently used maps in memory; windows walk forward, so the lowest
/// frame index is always the safest eviction victim.
class MapCache {
 public:
  MapCache(const std::vector<fs::path>& paths, std::size_t capacity)
      : paths_(paths), capacity_(capacity) {}

  const CodeIndexMap* get(int index) {
    if (index < 0 || index >= static_cast<int>(paths_.size())) return nullptr;
    auto it = loaded_.find(index);
    if (it == loaded_.end()) {
      it = loaded_.emplace(index, read_code_map(paths_[static_cast<std::size_t>(index)]).map).first;
      while (loaded_.size() > capacity_) {
        auto victim = loaded_.begin();
        if (victim->first == index) ++victim;
        if (victim == loaded_.end()) break;
        loaded_.erase(victim);
      }
    }
    return &it->second;
  }

 private:
  const std::vector<fs::path>& paths_;
  std::size_t capacity_;
  std::map<int, CodeIndexMap> loaded_;
};

void run_detect(const DetectArgs& args) {
  const auto [grid_rows, grid_cols] = parse_dims(args.grid, "--grid");

  const auto paths = list_code_maps(args.maps_dir);
  if (paths.empty()) throw DataError("no .sdcm maps in " + args.maps_dir);

  // All maps must share one shape and codebook size; mismatches name both files.
  const CodeMapFile reference = read_code_map_header(paths[0]);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const CodeMapFile header = read_code_map_header(paths[i]);
    if (header.map.height != reference.map.height || header.map.width != reference.map.width ||
        header.n_entries != reference.n_entries) {
      throw DataError("inconsistent maps: " + paths[0].string() + " is " +
                      std::to_string(reference.map.height) + "x" +
                      std::to_string(reference.map.width) + " (" +
                      std::to_string(reference.n_entries) + " entries) but " + paths[i].string() +
                      " is " + std::to_string(header.map.height) + "x" +
                      std::to_string(header.map.width) + " (" + std::to_string(header.n_entries) +
                      " entries)");
    }
  }

  PipelineConfig cfg;
  cfg.similarity = SimilarityParams{grid_rows, grid_cols, args.n_top, args.delta_sim};
  cfg.window.window_len =
      args.window_frames > 0 ? args.window_frames : window_len_from_seconds(args.window_sec, args.fps);
  cfg.window.stride = args.stride_frames > 0 ? args.stride_frames : cfg.window.window_len;
  cfg.window.skip = args.skip;
  cfg.window.fps = args.fps;
  cfg.detector.seed = args.seed;
  cfg.detector.max_iters = args.max_iters;
  cfg.detector.rel_tol = args.rel_tol;
  cfg.detector.standardize = args.standardize;
  cfg.paths.maps = args.maps_dir;
  cfg.paths.output = args.out;
  cfg.seed = args.seed;

  const int n_frames = static_cast<int>(paths.size());
  MapCache cache(paths, static_cast<std::size_t>(2 * cfg.window.window_len) + 4);
  const DetectionResult result =
      run_detection([&cache](int i) { return cache.get(i); }, n_frames, cfg);

  Prediction pred{cfg, result, kVersion, iso_utc_now(), result.clustering.degenerate};
  write_prediction(args.out, pred);
  if (!args.plot_csv.empty()) write_plot_csv(args.plot_csv, result.scores, result.windows);

  if (result.clustering.degenerate) {
    std::cerr << "warning: degenerate clustering, all windows scored identically\n";
  }
  int changed = 0;
  for (const WindowLabel& w : result.windows) changed += w.label == Label::changed ? 1 : 0;
  std::cout << "clustered " << result.windows.size() << " windows over " << n_frames
            << " frames: " << changed << " changed, " << result.windows.size() - changed
            << " not_changed -> " << args.out << "\n";
}

// ---- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::string pred;
  std::string gt;
  std::string report;
};

void run_evaluate(const EvaluateArgs& args) {
  const LoadedPrediction pred = read_prediction(args.pred);
  const std::vector<Label> gt = read_ground_truth_csv(args.gt);
  const ClassificationReport rep = report(gt, pred.frame_labels);

  std::cout << report_to_text(rep);
  if (!args.report.empty()) {
    std::ofstream out(args.report, std::ios::trunc);
    if (!out) throw DataError("cannot open " + args.report + " for writing");
    out << report_to_json(rep) << "\n";
    std::cout << "report -> " << args.report << "\n";
  }
}

// ---- score-pair -------------------------------------------------------------

struct ScorePairArgs {
  std::string map_a;
  std::string map_b;
  std::string grid = "5x5";
  int n_top = 5;
  int delta_sim = 2;
};

void run_score_pair(const ScorePairArgs& args) {
  const auto [grid_rows, grid_cols] = parse_dims(args.grid, "--grid");
  const SimilarityParams params{grid_rows, grid_cols, args.n_top, args.delta_sim};

  const CodeMapFile a = read_code_map(args.map_a);
  const CodeMapFile b = read_code_map(args.map_b);
  const SimilarityBreakdown breakdown = map_similarity_detail(a.map, b.map, params);

  std::cout << "similarity " << format_score(breakdown.score) << " (" << breakdown.similar_cells
            << "/" << params.n_cells() << " cells)\n";
  for (int r = 0; r < grid_rows; ++r) {
    for (int c = 0; c < grid_cols; ++c) {
      std::cout << static_cast<int>(breakdown.indicators[static_cast<std::size_t>(r * grid_cols + c)])
                << (c + 1 < grid_cols ? " " : "\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised scene-change detection over maritime video frames"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-codebook", "learn a codebook from frame patches");
  train->add_option("--frames", train_args.frames_dir, "directory of .pgm/.ppm frames")
      ->required();
  train->add_option("--patch", train_args.patch, "patch size HxW")->capture_default_str();
  train->add_option("--codebook-size", train_args.codebook_size, "number of code vectors")
      ->capture_default_str();
  train->add_option("--seed", train_args.seed, "codebook init seed")->capture_default_str();
  train->add_option("--max-iters", train_args.max_iters, "max centroid updates")
      ->capture_default_str();
  train->add_option("--rel-tol", train_args.rel_tol, "relative distortion stop threshold")
      ->capture_default_str();
  train->add_option("--resize", train_args.resize, "fit frames into WxH (3-channel) first");
  train->add_option("--out", train_args.out, "output .sdcb file")->required();
  train->callback([&] { run_train(train_args); });

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand("encode", "quantize frames into code-index maps");
  encode->add_option("--frames", encode_args.frames_dir, "directory of .pgm/.ppm frames")
      ->required();
  encode->add_option("--codebook", encode_args.codebook, "trained .sdcb file")->required();
  encode->add_option("--out-dir", encode_args.out_dir, "directory for .sdcm maps")->required();
  encode->add_option("--patch", encode_args.patch, "patch size HxW")->capture_default_str();
  encode->add_option("--resize", encode_args.resize, "fit frames into WxH (3-channel) first");
  encode->callback([&] { run_encode(encode_args); });

  DetectArgs detect_args;
  auto* detect = app.add_subcommand("detect", "window, score and cluster a map sequence");
  detect->add_option("--maps", detect_args.maps_dir, "directory of .sdcm maps")->required();
  detect->add_option("--window-sec", detect_args.window_sec, "window length in seconds")
      ->capture_default_str();
  detect->add_option("--window-frames", detect_args.window_frames,
                     "window length in frames (overrides --window-sec)");
  detect->add_option("--fps", detect_args.fps, "frames per second")->capture_default_str();
  detect->add_option("--skip", detect_args.skip, "frame skip inside a window")
      ->capture_default_str();
  detect->add_option("--grid", detect_args.grid, "similarity grid RxC")->capture_default_str();
  detect->add_option("--n-top", detect_args.n_top, "frequent codes kept per cell")
      ->capture_default_str();
  detect->add_option("--delta-sim", detect_args.delta_sim, "overlap threshold per cell")
      ->capture_default_str();
  detect->add_option("--stride-frames", detect_args.stride_frames,
                     "window stride (defaults to the window length)");
  detect->add_option("--seed", detect_args.seed, "clustering seed")->capture_default_str();
  detect->add_option("--max-iters", detect_args.max_iters, "max k-means updates")
      ->capture_default_str();
  detect->add_option("--rel-tol", detect_args.rel_tol, "relative inertia stop threshold")
      ->capture_default_str();
  detect->add_flag("--standardize", detect_args.standardize,
                   "z-score the (mean, std) axes before clustering");
  detect->add_option("--out", detect_args.out, "prediction JSON path")->capture_default_str();
  detect->add_option("--emit-plot-csv", detect_args.plot_csv,
                     "also write (window_start, mean, std, label) CSV");
  detect->callback([&] { run_detect(detect_args); });

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "compare a prediction against ground truth");
  evaluate->add_option("--pred", evaluate_args.pred, "prediction JSON from detect")->required();
  evaluate->add_option("--gt", evaluate_args.gt, "ground-truth CSV")->required();
  evaluate->add_option("--report", evaluate_args.report, "also write the report as JSON");
  evaluate->callback([&] { run_evaluate(evaluate_args); });

  ScorePairArgs score_args;
  auto* score = app.add_subcommand("score-pair", "similarity of two code maps");
  score->add_option("--map-a", score_args.map_a, "first .sdcm map")->required();
  score->add_option("--map-b", score_args.map_b, "second .sdcm map")->required();
  score->add_option("--grid", score_args.grid, "similarity grid RxC")->capture_default_str();
  score->add_option("--n-top", score_args.n_top, "frequent codes kept per cell")
      ->capture_default_str();
  score->add_option("--delta-sim", score_args.delta_sim, "overlap threshold per cell")
      ->capture_default_str();
  score->callback([&] { run_score_pair(score_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
