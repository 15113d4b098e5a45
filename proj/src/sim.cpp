#include "vgaze/sim.hpp"

#include "vgaze/heatmap.hpp"
#include "vgaze/pgm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

namespace vgaze {

namespace {

using nlohmann::ordered_json;

// Box-Muller over explicit 53-bit uniforms so streams are identical across
// standard library implementations.
struct Rng {
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return (eng() >> 11) * 0x1.0p-53; }
  double gauss() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
  Vec2d gauss2() {
    const double a = gauss();
    const double b = gauss();
    return {a, b};
  }
  std::mt19937_64 eng;
};

SegmentKind kind_from_string(const std::string& s) {
  if (s == "single_blob") return SegmentKind::SingleBlob;
  if (s == "multi_blob") return SegmentKind::MultiBlob;
  if (s == "large_region") return SegmentKind::LargeRegion;
  if (s == "blank") return SegmentKind::Blank;
  throw std::invalid_argument("scenario: unknown segment kind '" + s + "'");
}

}  // namespace

int ScenarioConfig::total_frames() const {
  int total = 0;
  for (const auto& s : segments) total += s.length_frames;
  return total;
}

Vec2d ScenarioConfig::offset_at(std::int64_t frame) const {
  Vec2d off{0.0, 0.0};
  for (const auto& o : offset_schedule)
    if (o.from_frame <= frame) off = o.offset;
  return off;
}

void ScenarioConfig::validate() const {
  if (fps <= 0.0) throw std::invalid_argument("scenario: fps must be > 0");
  if (frame_w < 8 || frame_h < 8)
    throw std::invalid_argument("scenario: frame_w/frame_h must be >= 8");
  if (segments.empty()) throw std::invalid_argument("scenario: segments must be non-empty");
  for (const auto& s : segments) {
    if (s.length_frames < 1)
      throw std::invalid_argument("scenario: segments[].length_frames must be >= 1");
    if (s.kind == SegmentKind::MultiBlob && s.k < 1)
      throw std::invalid_argument("scenario: segments[].k must be >= 1 for multi_blob");
  }
  if (duration_s > 0.0) {
    const int expected = static_cast<int>(std::lround(duration_s * fps));
    if (expected != total_frames())
      throw std::invalid_argument(
          "scenario: duration_s does not match the sum of segments[].length_frames");
  }
  if (samples_per_frame < 1)
    throw std::invalid_argument("scenario: samples_per_frame must be >= 1");
  if (gaze_noise_sigma < 0.0)
    throw std::invalid_argument("scenario: gaze_noise_sigma must be >= 0");
  if (blink_rate_per_min < 0.0)
    throw std::invalid_argument("scenario: blink_rate_per_min must be >= 0");
  std::int64_t prev = -1;
  for (const auto& o : offset_schedule) {
    if (o.from_frame <= prev)
      throw std::invalid_argument("scenario: offset_schedule frames must strictly increase");
    prev = o.from_frame;
  }
}

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
  }
  ScenarioConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.fps = j.value("fps", c.fps);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.frame_w = j.value("frame_w", c.frame_w);
    c.frame_h = j.value("frame_h", c.frame_h);
    c.gaze_noise_sigma = j.value("gaze_noise_sigma", c.gaze_noise_sigma);
    c.blink_rate_per_min = j.value("blink_rate_per_min", c.blink_rate_per_min);
    c.blink_magnitude_sigma = j.value("blink_magnitude_sigma", c.blink_magnitude_sigma);
    c.samples_per_frame = j.value("samples_per_frame", c.samples_per_frame);
    c.blob_walk_step_px = j.value("blob_walk_step_px", c.blob_walk_step_px);
    c.blob_sigma_px = j.value("blob_sigma_px", c.blob_sigma_px);
    c.background_amplitude = j.value("background_amplitude", c.background_amplitude);
    c.pose_dims = j.value("pose_dims", c.pose_dims);
    for (const auto& js : j.at("segments")) {
      SegmentSpec s;
      s.kind = kind_from_string(js.at("kind").get<std::string>());
      s.k = js.value("k", 1);
      s.length_frames = js.at("length_frames").get<int>();
      s.cut = js.value("cut", false);
      c.segments.push_back(s);
    }
    for (const auto& jo : j.value("offset_schedule", ordered_json::array())) {
      ScenarioConfig::OffsetChange o;
      o.from_frame = jo.at("from_frame").get<std::int64_t>();
      o.offset = {jo.at("dx").get<double>(), jo.at("dy").get<double>()};
      c.offset_schedule.push_back(o);
    }
    for (const auto& jp : j.value("pose_schedule", ordered_json::array())) {
      ScenarioConfig::PoseJump p;
      p.frame = jp.at("frame").get<std::int64_t>();
      p.magnitude = jp.at("magnitude").get<double>();
      c.pose_schedule.push_back(p);
    }
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

namespace {

struct Blob {
  Vec2d center_px{0.0, 0.0};  // (col, row), continuous
  Vec2d dir{0.0, 0.0};
};

// Live scene parameters, re-randomized at every hard transition.
struct Scene {
  SegmentKind kind = SegmentKind::Blank;
  std::vector<Blob> blobs;
  Vec2d region_center_px{0.0, 0.0};
  double region_radius_px = 0.0;
  std::vector<Vec2d> spots_px;
  double bg_fx = 0.0, bg_fy = 0.0, bg_phase = 0.0;
};

constexpr double kMarginPx = 10.0;

Vec2d random_interior(Rng& rng, int w, int h) {
  return {kMarginPx + rng.uniform() * (w - 2.0 * kMarginPx),
          kMarginPx + rng.uniform() * (h - 2.0 * kMarginPx)};
}

Scene make_scene(Rng& rng, const SegmentSpec& seg, const ScenarioConfig& cfg) {
  Scene sc;
  sc.kind = seg.kind;
  sc.bg_fx = 1.0 + std::floor(rng.uniform() * 4.0);
  sc.bg_fy = 1.0 + std::floor(rng.uniform() * 4.0);
  sc.bg_phase = rng.uniform() * 2.0 * std::numbers::pi;

  const int w = cfg.frame_w;
  const int h = cfg.frame_h;
  switch (seg.kind) {
    case SegmentKind::SingleBlob:
    case SegmentKind::MultiBlob: {
      const int k = seg.kind == SegmentKind::SingleBlob ? 1 : seg.k;
      for (int i = 0; i < k; ++i) {
        Blob b;
        // Anchor on a pixel center so a static blob peaks exactly there.
        Vec2d p = random_interior(rng, w, h);
        b.center_px = {std::round(p.x()), std::round(p.y())};
        const double ang = rng.uniform() * 2.0 * std::numbers::pi;
        b.dir = {std::cos(ang), std::sin(ang)};
        sc.blobs.push_back(b);
      }
      break;
    }
    case SegmentKind::LargeRegion: {
      sc.region_center_px = {w / 2.0, h / 2.0};
      // Disk covering ~65% of the frame.
      sc.region_radius_px = std::sqrt(0.65 * w * h / std::numbers::pi);
      for (int i = 0; i < 12; ++i) {
        const double ang = rng.uniform() * 2.0 * std::numbers::pi;
        const double rad = std::sqrt(rng.uniform()) * (sc.region_radius_px - 4.0);
        Vec2d p = sc.region_center_px + rad * Vec2d{std::cos(ang), std::sin(ang)};
        p.x() = std::clamp(p.x(), 2.0, w - 3.0);
        p.y() = std::clamp(p.y(), 2.0, h - 3.0);
        sc.spots_px.push_back({std::round(p.x()), std::round(p.y())});
      }
      break;
    }
    case SegmentKind::Blank:
      break;
  }
  return sc;
}

void walk_blobs(Rng& rng, Scene& sc, const ScenarioConfig& cfg) {
  for (Blob& b : sc.blobs) {
    // Slow random walk: gently rotate the direction, bounce off margins.
    const double turn = (rng.uniform() - 0.5) * 0.6;
    const double ca = std::cos(turn), sa = std::sin(turn);
    b.dir = {ca * b.dir.x() - sa * b.dir.y(), sa * b.dir.x() + ca * b.dir.y()};
    b.center_px += cfg.blob_walk_step_px * b.dir;
    if (b.center_px.x() < kMarginPx || b.center_px.x() > cfg.frame_w - kMarginPx) b.dir.x() *= -1.0;
    if (b.center_px.y() < kMarginPx || b.center_px.y() > cfg.frame_h - kMarginPx) b.dir.y() *= -1.0;
    b.center_px.x() = std::clamp(b.center_px.x(), kMarginPx, cfg.frame_w - kMarginPx);
    b.center_px.y() = std::clamp(b.center_px.y(), kMarginPx, cfg.frame_h - kMarginPx);
  }
}

GrayImage render(const Scene& sc, const ScenarioConfig& cfg) {
  const int w = cfg.frame_w;
  const int h = cfg.frame_h;
  Eigen::MatrixXd img = Eigen::MatrixXd::Constant(h, w, 20.0);

  if (sc.kind != SegmentKind::Blank && cfg.background_amplitude > 0.0) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c)
        img(r, c) += cfg.background_amplitude * 0.5 *
                     (1.0 + std::sin(2.0 * std::numbers::pi *
                                         (sc.bg_fx * c / w + sc.bg_fy * r / h) +
                                     sc.bg_phase));
  }

  auto add_gaussian = [&](const Vec2d& center_px, double sigma, double peak) {
    const int reach = static_cast<int>(std::ceil(4.0 * sigma));
    const int c0 = std::max(0, static_cast<int>(center_px.x()) - reach);
    const int c1 = std::min(w - 1, static_cast<int>(center_px.x()) + reach);
    const int r0 = std::max(0, static_cast<int>(center_px.y()) - reach);
    const int r1 = std::min(h - 1, static_cast<int>(center_px.y()) + reach);
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        const double d2 = (c - center_px.x()) * (c - center_px.x()) +
                          (r - center_px.y()) * (r - center_px.y());
        img(r, c) += peak * std::exp(-d2 / (2.0 * sigma * sigma));
      }
  };

  switch (sc.kind) {
    case SegmentKind::SingleBlob:
    case SegmentKind::MultiBlob:
      for (const Blob& b : sc.blobs) add_gaussian(b.center_px, cfg.blob_sigma_px, 235.0);
      break;
    case SegmentKind::LargeRegion: {
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
          if ((Vec2d{static_cast<double>(c), static_cast<double>(r)} - sc.region_center_px)
                  .norm() <= sc.region_radius_px)
            img(r, c) = 100.0;
      for (const Vec2d& s : sc.spots_px) add_gaussian(s, 1.5, 155.0);
      break;
    }
    case SegmentKind::Blank:
      break;
  }

  GrayImage out(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out(r, c) = static_cast<std::uint8_t>(std::clamp(std::floor(img(r, c) + 0.5), 0.0, 255.0));
  return out;
}

Vec2d attended_point_px(const Scene& sc) {
  switch (sc.kind) {
    case SegmentKind::SingleBlob:
    case SegmentKind::MultiBlob:
      return sc.blobs.front().center_px;
    case SegmentKind::LargeRegion:
      return sc.spots_px.front();
    case SegmentKind::Blank:
      return {-1.0, -1.0};  // hold previous
  }
  return {-1.0, -1.0};
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.seed);

  Scenario out;
  const int total = config.total_frames();
  out.frames.reserve(total);
  out.truth.frames.reserve(total);
  for (const auto& p : config.pose_schedule) out.truth.pose_event_frames.push_back(p.frame);

  const double frame_ms = 1000.0 / config.fps;
  Scene scene;
  bool have_scene = false;
  std::int64_t index = 0;
  Vec2d prev_attended{config.frame_w / 2.0, config.frame_h / 2.0};
  Vec2d held_truth{0.5, 0.5};

  for (std::size_t si = 0; si < config.segments.size(); ++si) {
    const SegmentSpec& seg = config.segments[si];
    const bool fresh = !have_scene || seg.cut || seg.kind != scene.kind;
    if (fresh) {
      scene = make_scene(rng, seg, config);
      have_scene = true;
      prev_attended = attended_point_px(scene);
    }
    if (seg.cut && index > 0) out.truth.cut_frames.push_back(index);

    for (int f = 0; f < seg.length_frames; ++f, ++index) {
      if (f > 0) walk_blobs(rng, scene, config);

      Frame frame;
      frame.index = index;
      frame.timestamp_ms = index * frame_ms;
      frame.is_key_frame = (f == 0);
      frame.pixels = render(scene, config);
      out.frames.push_back(std::move(frame));

      // True gaze: attended point with a 1-frame lag inside a segment,
      // snapped to the nearest pixel center, plus small tremor.
      Vec2d attend = attended_point_px(scene);
      GroundTruth::PerFrame pf;
      if (attend.x() < 0.0) {
        pf.gaze = held_truth;  // blank content: gaze holds
      } else {
        const Vec2d lagged = (f == 0) ? attend : prev_attended;
        const int px = static_cast<int>(std::lround(lagged.x()));
        const int py = static_cast<int>(std::lround(lagged.y()));
        pf.gaze = pixel_to_screen(px, py, config.frame_w, config.frame_h);
        prev_attended = attend;
      }
      if (config.gaze_noise_sigma > 0.0)
        pf.gaze += rng.gauss2() * (config.gaze_noise_sigma / 2.0);
      pf.gaze.x() = std::clamp(pf.gaze.x(), 0.0, 1.0);
      pf.gaze.y() = std::clamp(pf.gaze.y(), 0.0, 1.0);
      held_truth = pf.gaze;
      pf.offset = config.offset_at(index);
      out.truth.frames.push_back(pf);
    }
  }
  return out;
}

GazeTrace simulate_rough_gaze(const GroundTruth& truth, const ScenarioConfig& config) {
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  GazeTrace out;

  const int frames = static_cast<int>(truth.frames.size());
  const int spf = config.samples_per_frame;
  const std::int64_t total_samples = static_cast<std::int64_t>(frames) * spf;
  const double frame_ms = 1000.0 / config.fps;

  // Deterministic blink schedule: evenly spaced events with a seeded phase,
  // each spanning one or two consecutive samples.
  std::set<std::int64_t> blink_samples;
  const double duration_min = frames / config.fps / 60.0;
  const int n_blinks = static_cast<int>(std::lround(config.blink_rate_per_min * duration_min));
  if (n_blinks > 0 && total_samples > 0) {
    const double spacing = static_cast<double>(total_samples) / n_blinks;
    const double phase = rng.uniform() * spacing;
    for (int b = 0; b < n_blinks; ++b) {
      const std::int64_t start =
          std::min<std::int64_t>(total_samples - 1,
                                 static_cast<std::int64_t>(std::floor(phase + b * spacing)));
      blink_samples.insert(start);
      if (b % 2 == 1 && start + 1 < total_samples) blink_samples.insert(start + 1);
    }
    out.blink_events = n_blinks;
  }

  const double blink_dy = config.blink_magnitude_sigma * config.gaze_noise_sigma;
  std::int64_t si = 0;
  for (int f = 0; f < frames; ++f) {
    const GroundTruth::PerFrame& pf = truth.frames[f];
    for (int j = 0; j < spf; ++j, ++si) {
      RoughGazeSample s;
      s.frame_index = f;
      s.timestamp_ms = f * frame_ms + (j + 0.5) * frame_ms / spf;
      s.position = pf.gaze + pf.offset;
      if (config.gaze_noise_sigma > 0.0)
        s.position += rng.gauss2() * config.gaze_noise_sigma;
      if (blink_samples.count(si)) s.position.y() += blink_dy;
      out.samples.push_back(s);
    }
  }

  // One pose per frame; jumps are permanent baseline shifts co-timed with
  // the offset schedule by scenario construction.
  Eigen::VectorXd baseline = Eigen::VectorXd::Constant(config.pose_dims, 0.5);
  for (int f = 0; f < frames; ++f) {
    for (const auto& pj : config.pose_schedule)
      if (pj.frame == f)
        baseline.array() += pj.magnitude / std::sqrt(static_cast<double>(config.pose_dims));
    HeadPose p;
    p.timestamp_ms = f * frame_ms;
    p.pose = baseline;
    out.poses.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CorpusSummary write_corpus(const std::filesystem::path& dir, const ScenarioConfig& config) {
  std::filesystem::create_directories(dir);
  const Scenario scenario = generate_scenario(config);
  const GazeTrace trace = simulate_rough_gaze(scenario.truth, config);

  ordered_json manifest;
  manifest["fps"] = config.fps;
  manifest["width"] = config.frame_w;
  manifest["height"] = config.frame_h;
  manifest["frames"] = ordered_json::array();
  for (const Frame& f : scenario.frames) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06lld.pgm", static_cast<long long>(f.index));
    write_pgm(dir / name, f.pixels);
    manifest["frames"].push_back({{"index", f.index},
                                  {"t_ms", f.timestamp_ms},
                                  {"key", f.is_key_frame},
                                  {"file", name}});
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(1) << "\n";

  ordered_json truth;
  truth["frames"] = ordered_json::array();
  for (std::size_t i = 0; i < scenario.truth.frames.size(); ++i) {
    const auto& pf = scenario.truth.frames[i];
    truth["frames"].push_back({{"index", i},
                               {"gaze", {pf.gaze.x(), pf.gaze.y()}},
                               {"offset", {pf.offset.x(), pf.offset.y()}}});
  }
  truth["cuts"] = scenario.truth.cut_frames;
  truth["pose_events"] = scenario.truth.pose_event_frames;
  std::ofstream(dir / "truth.json") << truth.dump(1) << "\n";

  {
    std::ofstream gaze(dir / "gaze.csv");
    gaze << "t_ms,frame_index,x,y\n";
    for (const auto& s : trace.samples)
      gaze << fmt_double(s.timestamp_ms) << "," << s.frame_index << ","
           << fmt_double(s.position.x()) << "," << fmt_double(s.position.y()) << "\n";
  }
  {
    std::ofstream pose(dir / "pose.csv");
    pose << "t_ms";
    for (int d = 0; d < config.pose_dims; ++d) pose << ",p" << d;
    pose << "\n";
    for (const auto& p : trace.poses) {
      pose << fmt_double(p.timestamp_ms);
      for (int d = 0; d < config.pose_dims; ++d) pose << "," << fmt_double(p.pose[d]);
      pose << "\n";
    }
  }

  CorpusSummary summary;
  summary.frames = static_cast<int>(scenario.frames.size());
  summary.samples = static_cast<int>(trace.samples.size());
  summary.cuts = static_cast<int>(scenario.truth.cut_frames.size());
  return summary;
}

GroundTruth read_truth(const std::filesystem::path& truth_json) {
  std::ifstream in(truth_json);
  if (!in) throw std::runtime_error("cannot open: " + truth_json.string());
  ordered_json j = ordered_json::parse(in);
  GroundTruth t;
  for (const auto& jf : j.at("frames")) {
    GroundTruth::PerFrame pf;
    pf.gaze = {jf.at("gaze")[0].get<double>(), jf.at("gaze")[1].get<double>()};
    pf.offset = {jf.at("offset")[0].get<double>(), jf.at("offset")[1].get<double>()};
    t.frames.push_back(pf);
  }
  for (const auto& c : j.value("cuts", ordered_json::array()))
    t.cut_frames.push_back(c.get<std::int64_t>());
  for (const auto& p : j.value("pose_events", ordered_json::array()))
    t.pose_event_frames.push_back(p.get<std::int64_t>());
  return t;
}

}  // namespace vgaze
