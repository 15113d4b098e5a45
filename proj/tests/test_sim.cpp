#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "vgaze/heatmap.hpp"
#include "vgaze/sim.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace vgaze;
namespace fs = std::filesystem;

namespace {

ScenarioConfig base_config(std::uint64_t seed = 7) {
  ScenarioConfig c;
  c.seed = seed;
  c.segments = {{SegmentKind::SingleBlob, 1, 30, false}};
  return c;
}

// Exactness setup: static scene, no noise, no texture, no blinks.
ScenarioConfig clean_config(std::uint64_t seed = 7) {
  ScenarioConfig c = base_config(seed);
  c.gaze_noise_sigma = 0.0;
  c.blink_rate_per_min = 0.0;
  c.blob_walk_step_px = 0.0;
  c.background_amplitude = 0.0;
  return c;
}

}  // namespace

TEST_CASE("generate_scenario is bit-identical per seed") {
  const ScenarioConfig cfg = base_config(11);
  const Scenario a = generate_scenario(cfg);
  const Scenario b = generate_scenario(cfg);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    CHECK(a.frames[i].pixels == b.frames[i].pixels);
  REQUIRE(a.truth.frames.size() == b.truth.frames.size());
  for (std::size_t i = 0; i < a.truth.frames.size(); ++i) {
    CHECK(a.truth.frames[i].gaze == b.truth.frames[i].gaze);
    CHECK(a.truth.frames[i].offset == b.truth.frames[i].offset);
  }

  const Scenario c = generate_scenario(base_config(12));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.frames.size() && !any_diff; ++i)
    any_diff = a.frames[i].pixels != c.frames[i].pixels;
  CHECK(any_diff);
}

TEST_CASE("simulate_rough_gaze is deterministic per seed") {
  const ScenarioConfig cfg = base_config(3);
  const Scenario sc = generate_scenario(cfg);
  const GazeTrace a = simulate_rough_gaze(sc.truth, cfg);
  const GazeTrace b = simulate_rough_gaze(sc.truth, cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].timestamp_ms == b.samples[i].timestamp_ms);
    CHECK(a.samples[i].position == b.samples[i].position);
  }
  REQUIRE(a.poses.size() == b.poses.size());
  for (std::size_t i = 0; i < a.poses.size(); ++i)
    CHECK(a.poses[i].pose == b.poses[i].pose);
}

TEST_CASE("frame stream shape: timestamps, key flags, sample counts") {
  ScenarioConfig cfg = base_config();
  cfg.segments = {{SegmentKind::SingleBlob, 1, 10, false},
                  {SegmentKind::Blank, 1, 5, true}};
  const Scenario sc = generate_scenario(cfg);
  REQUIRE(static_cast<int>(sc.frames.size()) == 15);
  for (int i = 0; i < 15; ++i) {
    CHECK(sc.frames[i].index == i);
    CHECK(sc.frames[i].timestamp_ms == doctest::Approx(i * 1000.0 / 30.0));
    CHECK(sc.frames[i].is_key_frame == (i == 0 || i == 10));
  }
  CHECK(sc.truth.cut_frames == std::vector<std::int64_t>{10});

  const GazeTrace trace = simulate_rough_gaze(sc.truth, cfg);
  CHECK(trace.samples.size() == 15u * 2u);
  CHECK(trace.poses.size() == 15u);
  // Sample timestamps sit strictly inside the frame interval.
  for (const auto& s : trace.samples) {
    const double frame_start = s.frame_index * 1000.0 / 30.0;
    CHECK(s.timestamp_ms > frame_start);
    CHECK(s.timestamp_ms < frame_start + 1000.0 / 30.0);
  }
}

TEST_CASE("blank segments render flat and hold the true gaze") {
  ScenarioConfig cfg = clean_config();
  cfg.segments = {{SegmentKind::Blank, 1, 6, false}};
  const Scenario sc = generate_scenario(cfg);
  for (const Frame& f : sc.frames)
    CHECK((f.pixels.array() == 20).all());
  for (const auto& pf : sc.truth.frames) {
    CHECK(pf.gaze.x() == doctest::Approx(0.5));
    CHECK(pf.gaze.y() == doctest::Approx(0.5));
  }
}

TEST_CASE("a clean static blob puts the true gaze on the brightest pixel") {
  const ScenarioConfig cfg = clean_config(21);
  const Scenario sc = generate_scenario(cfg);

  // All frames identical (no walk), blob peak saturates at 255.
  for (std::size_t i = 1; i < sc.frames.size(); ++i)
    CHECK(sc.frames[i].pixels == sc.frames[0].pixels);

  int br = -1, bc = -1, best = -1;
  for (int r = 0; r < cfg.frame_h; ++r)
    for (int c = 0; c < cfg.frame_w; ++c)
      if (sc.frames[0].pixels(r, c) > best) {
        best = sc.frames[0].pixels(r, c);
        br = r;
        bc = c;
      }
  CHECK(best == 255);
  const Vec2d expected = pixel_to_screen(bc, br, cfg.frame_w, cfg.frame_h);
  for (const auto& pf : sc.truth.frames) {
    CHECK(pf.gaze.x() == expected.x());
    CHECK(pf.gaze.y() == expected.y());
  }

  // And the detector recovers exactly that point.
  const SaliencyHeatmap hm = spectral_residual_saliency(sc.frames[0]);
  const auto fv = extract_feature_vector(hm, 128, 0.6, 0);
  REQUIRE(fv.has_value());
  REQUIRE(fv->peaks.size() == 1);
  CHECK(fv->peaks[0].x() == expected.x());
  CHECK(fv->peaks[0].y() == expected.y());
}

TEST_CASE("large-region content is rejected by the spatial gate") {
  ScenarioConfig cfg = clean_config(5);
  cfg.segments = {{SegmentKind::LargeRegion, 1, 3, false}};
  const Scenario sc = generate_scenario(cfg);
  const SaliencyHeatmap hm = spectral_residual_saliency(sc.frames[0]);
  CHECK_FALSE(extract_feature_vector(hm, 128, 0.6, 0).has_value());
}

TEST_CASE("scene state is inherited across an uncut segment boundary") {
  ScenarioConfig cfg = clean_config(13);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 5, false},
                  {SegmentKind::SingleBlob, 1, 5, false},   // continuation
                  {SegmentKind::SingleBlob, 1, 5, true}};   // hard cut
  const Scenario sc = generate_scenario(cfg);
  // No walk: the continuation's key frame repeats the previous content.
  CHECK(sc.frames[5].pixels == sc.frames[4].pixels);
  CHECK(sc.frames[5].is_key_frame);
  // The cut re-randomizes the scene.
  CHECK(sc.frames[10].pixels != sc.frames[9].pixels);
  CHECK(sc.truth.cut_frames == std::vector<std::int64_t>{10});
}

TEST_CASE("rough gaze carries the scheduled offset") {
  ScenarioConfig cfg = clean_config(9);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 20, false}};
  cfg.offset_schedule = {{0, Vec2d{0.15, -0.08}}, {10, Vec2d{-0.05, 0.02}}};
  const Scenario sc = generate_scenario(cfg);
  const GazeTrace trace = simulate_rough_gaze(sc.truth, cfg);
  for (const auto& s : trace.samples) {
    const Vec2d expected = sc.truth.frames[s.frame_index].gaze +
                           cfg.offset_at(s.frame_index);
    CHECK(s.position.x() == doctest::Approx(expected.x()).epsilon(1e-12));
    CHECK(s.position.y() == doctest::Approx(expected.y()).epsilon(1e-12));
  }
  CHECK(cfg.offset_at(-1) == Vec2d{0.0, 0.0});
  CHECK(cfg.offset_at(9) == Vec2d{0.15, -0.08});
  CHECK(cfg.offset_at(10) == Vec2d{-0.05, 0.02});
}

TEST_CASE("gaze noise matches the configured sigma empirically") {
  ScenarioConfig cfg = base_config(31);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 5000, false}};
  cfg.blink_rate_per_min = 0.0;
  cfg.gaze_noise_sigma = 0.01;
  const Scenario sc = generate_scenario(cfg);
  const GazeTrace trace = simulate_rough_gaze(sc.truth, cfg);
  REQUIRE(trace.samples.size() == 10000u);

  double sx = 0.0, sy = 0.0, sx2 = 0.0, sy2 = 0.0;
  for (const auto& s : trace.samples) {
    const Vec2d res = s.position - sc.truth.frames[s.frame_index].gaze;
    sx += res.x();
    sy += res.y();
    sx2 += res.x() * res.x();
    sy2 += res.y() * res.y();
  }
  const double n = static_cast<double>(trace.samples.size());
  const double sig_x = std::sqrt(sx2 / n - (sx / n) * (sx / n));
  const double sig_y = std::sqrt(sy2 / n - (sy / n) * (sy / n));
  CHECK(sig_x == doctest::Approx(0.01).epsilon(0.1));
  CHECK(sig_y == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("blink schedule: 17 per minute, visible as large y excursions") {
  ScenarioConfig cfg = base_config(17);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 1800, false}};  // 60 s at 30 fps
  const Scenario sc = generate_scenario(cfg);
  const GazeTrace trace = simulate_rough_gaze(sc.truth, cfg);
  CHECK(trace.blink_events == 17);

  // Blink excursion is 8 sigma; count samples deviating beyond 4 sigma on y.
  int big = 0;
  for (const auto& s : trace.samples) {
    const double dy = s.position.y() - sc.truth.frames[s.frame_index].gaze.y();
    if (std::abs(dy) > 4.0 * cfg.gaze_noise_sigma) ++big;
  }
  // 17 blink starts plus a second sample on every other event.
  CHECK(big >= 17);
  CHECK(big <= 30);
}

TEST_CASE("pose stream is per-frame with permanent jumps of the given size") {
  ScenarioConfig cfg = clean_config(2);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 10, false}};
  cfg.pose_schedule = {{4, 0.2}};
  const Scenario sc = generate_scenario(cfg);
  CHECK(sc.truth.pose_event_frames == std::vector<std::int64_t>{4});

  const GazeTrace trace = simulate_rough_gaze(sc.truth, cfg);
  REQUIRE(trace.poses.size() == 10u);
  for (std::size_t i = 1; i < trace.poses.size(); ++i) {
    const double d = (trace.poses[i].pose - trace.poses[i - 1].pose).norm();
    if (i == 4)
      CHECK(d == doctest::Approx(0.2).epsilon(1e-12));
    else
      CHECK(d == doctest::Approx(0.0));
  }
}

TEST_CASE("write_corpus materializes a readable corpus") {
  const fs::path dir = fs::temp_directory_path() / "vgaze_sim_test_corpus";
  fs::remove_all(dir);

  ScenarioConfig cfg = base_config(6);
  cfg.segments = {{SegmentKind::SingleBlob, 1, 8, false},
                  {SegmentKind::MultiBlob, 3, 4, true}};
  const CorpusSummary summary = write_corpus(dir, cfg);
  CHECK(summary.frames == 12);
  CHECK(summary.samples == 24);
  CHECK(summary.cuts == 1);

  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "truth.json"));
  CHECK(fs::exists(dir / "gaze.csv"));
  CHECK(fs::exists(dir / "pose.csv"));
  CHECK(fs::exists(dir / "frame_000000.pgm"));
  CHECK(fs::exists(dir / "frame_000011.pgm"));

  const GroundTruth rt = read_truth(dir / "truth.json");
  const Scenario sc = generate_scenario(cfg);
  REQUIRE(rt.frames.size() == sc.truth.frames.size());
  for (std::size_t i = 0; i < rt.frames.size(); ++i) {
    CHECK(rt.frames[i].gaze == sc.truth.frames[i].gaze);
    CHECK(rt.frames[i].offset == sc.truth.frames[i].offset);
  }
  CHECK(rt.cut_frames == sc.truth.cut_frames);
  fs::remove_all(dir);
}

TEST_CASE("scenario JSON parsing applies defaults and validates") {
  const ScenarioConfig c = ScenarioConfig::from_json_text(R"({
    "seed": 42,
    "duration_s": 2.0,
    "segments": [
      {"kind": "single_blob", "length_frames": 40},
      {"kind": "large_region", "length_frames": 20, "cut": true}
    ],
    "offset_schedule": [{"from_frame": 0, "dx": 0.1, "dy": -0.2}],
    "pose_schedule": [{"frame": 30, "magnitude": 0.2}]
  })");
  CHECK(c.seed == 42);
  CHECK(c.fps == 30.0);
  CHECK(c.total_frames() == 60);
  CHECK(c.segments[1].cut);
  CHECK(c.offset_schedule.size() == 1);
  CHECK(c.pose_schedule.size() == 1);

  CHECK_THROWS_AS(ScenarioConfig::from_json_text("{nope"), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text("{}"), std::invalid_argument);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(
                      R"({"segments":[{"kind":"wat","length_frames":5}]})"),
                  std::invalid_argument);
  // duration_s inconsistent with segment lengths
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(
                      R"({"duration_s": 1.0,
                          "segments":[{"kind":"blank","length_frames":5}]})"),
                  std::invalid_argument);
  // non-increasing offset schedule
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(
                      R"({"segments":[{"kind":"blank","length_frames":5}],
                          "offset_schedule":[{"from_frame":3,"dx":0,"dy":0},
                                             {"from_frame":3,"dx":1,"dy":0}]})"),
                  std::invalid_argument);
}
