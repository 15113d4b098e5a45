#include "vgaze/pipeline.hpp"

#include "vgaze/heatmap.hpp"
#include "vgaze/pgm.hpp"
#include "vgaze/sim.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vgaze {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

std::vector<RoughGazeSample> read_gaze_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_ms", 0) != 0)
    throw std::runtime_error("gaze CSV missing header 't_ms,frame_index,x,y': " + path.string());
  std::vector<RoughGazeSample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error("bad gaze CSV row in " + path.string() + ": " + line);
    RoughGazeSample s;
    s.timestamp_ms = std::stod(f[0]);
    s.frame_index = std::stoll(f[1]);
    s.position = {std::stod(f[2]), std::stod(f[3])};
    out.push_back(s);
  }
  return out;
}

HistoricalTrajectories read_historical_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("user_id", 0) != 0)
    throw std::runtime_error("historical CSV missing header 'user_id,frame_index,x,y': " +
                             path.string());
  HistoricalTrajectories hist;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error("bad historical CSV row in " + path.string() + ": " + line);
    hist[std::stoll(f[1])].push_back({std::stod(f[2]), std::stod(f[3])});
  }
  return hist;
}

namespace {

std::vector<HeadPose> read_pose_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_ms", 0) != 0)
    throw std::runtime_error("pose CSV missing header: " + path.string());
  const int dims = static_cast<int>(split_csv_line(line).size()) - 1;
  std::vector<HeadPose> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (static_cast<int>(f.size()) != dims + 1)
      throw std::runtime_error("bad pose CSV row in " + path.string() + ": " + line);
    HeadPose p;
    p.timestamp_ms = std::stod(f[0]);
    p.pose.resize(dims);
    for (int d = 0; d < dims; ++d) p.pose[d] = std::stod(f[d + 1]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("corpus manifest not found: " + manifest_path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("bad manifest " + manifest_path.string() + ": " + e.what());
  }

  Corpus c;
  c.dir = dir;
  c.fps = j.at("fps").get<double>();
  c.width = j.at("width").get<int>();
  c.height = j.at("height").get<int>();
  for (const auto& jf : j.at("frames")) {
    FrameMeta m;
    m.index = jf.at("index").get<std::int64_t>();
    m.t_ms = jf.at("t_ms").get<double>();
    m.key = jf.at("key").get<bool>();
    m.file = jf.at("file").get<std::string>();
    c.frames.push_back(std::move(m));
  }
  if (std::filesystem::exists(dir / "gaze.csv")) c.gaze = read_gaze_csv(dir / "gaze.csv");
  if (std::filesystem::exists(dir / "pose.csv")) c.poses = read_pose_csv(dir / "pose.csv");
  return c;
}

void TimingReport::print(std::ostream& os) const {
  const double per_frame =
      frames_processed > 0 ? (detection_ms + selection_ms) / frames_processed : 0.0;
  os << "per-module timing\n"
     << "  detection    " << detection_ms << " ms\n"
     << "  selection    " << selection_ms << " ms\n"
     << "  temporal     " << temporal_ms << " ms\n"
     << "  calibration  " << calibration_ms << " ms\n"
     << "  io           " << io_ms << " ms\n"
     << "  frames       " << frames_processed;
  if (per_frame > 0.0)
    os << "  (" << per_frame << " ms/frame detection+selection, "
       << 1000.0 / per_frame << " fps)";
  os << "\n";
}

namespace {

enum class EventType { Pose = 0, Frame = 1, Gaze = 2 };

struct Event {
  double t_ms = 0.0;
  EventType type = EventType::Frame;
  std::size_t idx = 0;  // into the corpus vector for its type
};

std::string jsonl_gaze(const EmittedGaze& g) {
  ordered_json j;
  j["t_ms"] = g.t_ms;
  j["frame"] = g.frame;
  j["x"] = g.x;
  j["y"] = g.y;
  j["calibrated"] = g.calibrated;
  return j.dump();
}

std::string jsonl_transform(const TransformVector& t) {
  ordered_json j;
  j["t_ms"] = t.computed_at_ms;
  j["vc"] = {t.dx, t.dy};
  j["source"] = to_string(t.source);
  return j.dump();
}

std::string jsonl_window(double t_ms, const WindowStats& w) {
  ordered_json j;
  j["t_ms"] = t_ms;
  j["window"] = {{"frames_seen", w.frames_seen}, {"frames_accepted", w.frames_accepted}};
  return j.dump();
}

}  // namespace

RunResult run_pipeline(const Corpus& corpus, const RunConfig& config, std::ostream& out) {
  RunResult result;
  HistoricalTrajectories hist;
  if (!config.historical_csv.empty()) hist = read_historical_csv(config.historical_csv);
  Session session(config, std::move(hist));
  session.set_timing(&result.timing);

  std::vector<Event> events;
  events.reserve(corpus.frames.size() + corpus.gaze.size() + corpus.poses.size());
  for (std::size_t i = 0; i < corpus.poses.size(); ++i)
    events.push_back({corpus.poses[i].timestamp_ms, EventType::Pose, i});
  for (std::size_t i = 0; i < corpus.frames.size(); ++i)
    events.push_back({corpus.frames[i].t_ms, EventType::Frame, i});
  for (std::size_t i = 0; i < corpus.gaze.size(); ++i)
    events.push_back({corpus.gaze[i].timestamp_ms, EventType::Gaze, i});
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
    return static_cast<int>(a.type) < static_cast<int>(b.type);
  });

  auto emit = [&](const StepResult& step) {
    for (const auto& g : step.gazes) {
      out << jsonl_gaze(g) << "\n";
      ++result.gaze_records;
    }
    if (step.new_transform) {
      out << jsonl_transform(*step.new_transform) << "\n";
      out << jsonl_window(step.new_transform->computed_at_ms, session.last_window_stats())
          << "\n";
      ++result.transforms;
    }
  };

  for (const Event& ev : events) {
    switch (ev.type) {
      case EventType::Pose:
        emit(session.on_pose(corpus.poses[ev.idx]));
        break;
      case EventType::Frame: {
        const FrameMeta& m = corpus.frames[ev.idx];
        const auto io_start = std::chrono::steady_clock::now();
        Frame f;
        f.index = m.index;
        f.timestamp_ms = m.t_ms;
        f.is_key_frame = m.key;
        f.pixels = read_pgm(corpus.dir / m.file);

        char td_name[32];
        std::snprintf(td_name, sizeof(td_name), "sal_td_%06lld.pgm",
                      static_cast<long long>(m.index));
        std::optional<SaliencyHeatmap> td;
        if (std::filesystem::exists(corpus.dir / td_name)) {
          td.emplace();
          td->values = read_pgm(corpus.dir / td_name);
          td->source = SaliencySource::TopDownExternal;
        }
        result.timing.io_ms += std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - io_start)
                                   .count();
        emit(session.on_frame(f, td ? &*td : nullptr));
        break;
      }
      case EventType::Gaze:
        emit(session.on_gaze(corpus.gaze[ev.idx]));
        break;
    }
  }
  return result;
}

RunResult run_pipeline_to_file(const std::filesystem::path& corpus_dir,
                               const RunConfig& config,
                               const std::filesystem::path& out_jsonl,
                               TimingReport* timing) {
  const Corpus corpus = load_corpus(corpus_dir);
  std::ofstream out(out_jsonl);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_jsonl.string());
  RunResult r = run_pipeline(corpus, config, out);
  if (timing) *timing = r.timing;
  return r;
}

std::string EvaluateReport::to_json() const {
  ordered_json j;
  j["n_samples"] = n_samples;
  j["mean_error"] = mean_error;
  j["median_error"] = median_error;
  j["p95_error"] = p95_error;
  if (mean_error_cm > 0.0 || mean_error_deg > 0.0) {
    j["mean_error_cm"] = mean_error_cm;
    j["mean_error_deg"] = mean_error_deg;
  }
  j["transforms"] = transforms;
  j["frames_cost_per_30_valid"] = frames_cost_per_30_valid;
  return j.dump(1);
}

EvaluateReport evaluate_run(const std::filesystem::path& run_jsonl,
                            const std::filesystem::path& truth_json,
                            const EvaluateOptions& opts) {
  const GroundTruth truth = read_truth(truth_json);
  std::ifstream in(run_jsonl);
  if (!in) throw std::runtime_error("cannot open: " + run_jsonl.string());

  EvaluateReport rep;
  std::vector<double> errors;
  std::vector<std::pair<double, double>> series;
  long long window_seen = 0;
  long long window_accepted = 0;

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line);
    if (j.contains("vc")) {
      ++rep.transforms;
    } else if (j.contains("window")) {
      window_seen += j["window"].at("frames_seen").get<int>();
      window_accepted += j["window"].at("frames_accepted").get<int>();
    } else if (j.contains("x")) {
      const std::int64_t frame = j.at("frame").get<std::int64_t>();
      if (frame < 0 || frame >= static_cast<std::int64_t>(truth.frames.size()))
        throw std::runtime_error("run references frame " + std::to_string(frame) +
                                 " absent from the ground truth (mismatched corpus?)");
      const Vec2d emitted{j.at("x").get<double>(), j.at("y").get<double>()};
      const double err = (emitted - truth.frames[frame].gaze).norm();
      errors.push_back(err);
      series.emplace_back(j.at("t_ms").get<double>(), err);
    }
  }

  rep.n_samples = static_cast<int>(errors.size());
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    rep.mean_error = sum / errors.size();
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    rep.median_error = sorted[sorted.size() / 2];
    rep.p95_error = sorted[static_cast<std::size_t>(0.95 * (sorted.size() - 1))];
  }
  if (opts.screen_diag_cm > 0.0) {
    rep.mean_error_cm = rep.mean_error * opts.screen_diag_cm;
    rep.mean_error_deg = 2.0 * std::atan(rep.mean_error_cm / (2.0 * opts.view_dist_cm)) *
                         180.0 / 3.14159265358979323846;
  }
  if (window_accepted > 0)
    rep.frames_cost_per_30_valid =
        30.0 * static_cast<double>(window_seen) / static_cast<double>(window_accepted);

  if (!opts.series_csv.empty()) {
    std::ofstream csv(opts.series_csv);
    if (!csv) throw std::runtime_error("cannot open for writing: " + opts.series_csv.string());
    csv << "t_ms,error\n";
    char buf[80];
    for (const auto& [t, e] : series) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, e);
      csv << buf;
    }
  }
  return rep;
}

std::vector<SweepCell> sweep_thresholds(const Corpus& corpus, const RunConfig& base,
                                        const std::vector<int>& bin_thresholds,
                                        const std::vector<double>& scs_thresholds) {
  // Detect once per frame; only the thresholds vary across cells.
  std::vector<SaliencyHeatmap> heatmaps;
  heatmaps.reserve(corpus.frames.size());
  for (const FrameMeta& m : corpus.frames) {
    Frame f;
    f.pixels = read_pgm(corpus.dir / m.file);
    if (f.width() != base.working_w || f.height() != base.working_h)
      f = downscale(f, base.working_w, base.working_h);
    heatmaps.push_back(spectral_residual_saliency(f));
  }

  std::vector<SweepCell> cells;
  for (int bt : bin_thresholds) {
    for (double st : scs_thresholds) {
      SweepCell cell;
      cell.bin_threshold = bt;
      cell.scs_threshold = st;
      cell.frames_total = static_cast<int>(heatmaps.size());
      for (const auto& hm : heatmaps)
        if (score_heatmap(hm, bt).scs >= st) ++cell.frames_valid;
      cell.frames_cost_per_30_valid =
          cell.frames_valid > 0
              ? 30.0 * cell.frames_total / static_cast<double>(cell.frames_valid)
              : -1.0;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string sweep_to_json(const std::vector<SweepCell>& cells) {
  ordered_json j = ordered_json::array();
  for (const auto& c : cells)
    j.push_back({{"bin_threshold", c.bin_threshold},
                 {"scs_threshold", c.scs_threshold},
                 {"frames_total", c.frames_total},
                 {"frames_valid", c.frames_valid},
                 {"frames_cost_per_30_valid", c.frames_cost_per_30_valid}});
  return j.dump(1);
}

RunConfig run_config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: malformed JSON in " + path.string() + ": " + e.what());
  }
  RunConfig c;
  c.bin_threshold = j.value("bin_threshold", c.bin_threshold);
  c.scs_threshold = j.value("scs_threshold", c.scs_threshold);
  c.window_n = j.value("window_n", c.window_n);
  c.cut_window_n = j.value("cut_window_n", c.cut_window_n);
  c.bottom_up_frames = j.value("bottom_up_frames", c.bottom_up_frames);
  c.cut_hash_threshold = j.value("cut_hash_threshold", c.cut_hash_threshold);
  c.zscore_alpha = j.value("zscore_alpha", c.zscore_alpha);
  c.cluster_epsilon = j.value("cluster_epsilon", c.cluster_epsilon);
  c.cluster_min_size = j.value("cluster_min_size", c.cluster_min_size);
  c.head_move_threshold = j.value("head_move_threshold", c.head_move_threshold);
  c.window_cap_multiplier = j.value("window_cap_multiplier", c.window_cap_multiplier);
  c.working_w = j.value("working_w", c.working_w);
  c.working_h = j.value("working_h", c.working_h);
  c.hist_min_points = j.value("hist_min_points", c.hist_min_points);
  if (j.contains("orientation"))
    c.orientation = orientation_from_string(j["orientation"].get<std::string>());
  c.landscape_kx = j.value("landscape_kx", c.landscape_kx);
  c.landscape_y_floor = j.value("landscape_y_floor", c.landscape_y_floor);
  c.landscape_cy = j.value("landscape_cy", c.landscape_cy);
  c.face_rotation_deg = j.value("face_rotation_deg", c.face_rotation_deg);
  c.recalibration = j.value("recalibration", c.recalibration);
  c.zscore_enabled = j.value("zscore_enabled", c.zscore_enabled);
  c.historical_csv = j.value("historical_csv", c.historical_csv);
  c.validate();
  return c;
}

}  // namespace vgaze
