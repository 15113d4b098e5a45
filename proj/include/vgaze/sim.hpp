#pragma once

#include "vgaze/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace vgaze {

enum class SegmentKind { SingleBlob, MultiBlob, LargeRegion, Blank };

struct SegmentSpec {
  SegmentKind kind = SegmentKind::SingleBlob;
  int k = 1;                // blob count for MultiBlob
  int length_frames = 0;
  bool cut = false;         // segment begins with a key-framed hard transition
};

/// Knobs of one synthetic scenario. Deterministic per seed.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  double fps = 30.0;
  double duration_s = 0.0;  // 0 -> derived from segments
  int frame_w = 68;
  int frame_h = 68;

  double gaze_noise_sigma = 0.01;     // normalized units
  double blink_rate_per_min = 17.0;
  double blink_magnitude_sigma = 8.0; // excursion in units of sigma
  int samples_per_frame = 2;

  double blob_walk_step_px = 0.25;
  double blob_sigma_px = 2.5;
  double background_amplitude = 30.0; // per-scene low-frequency texture; 0 = plain

  std::vector<SegmentSpec> segments;

  struct OffsetChange {
    std::int64_t from_frame = 0;
    Vec2d offset{0.0, 0.0};
  };
  std::vector<OffsetChange> offset_schedule;

  struct PoseJump {
    std::int64_t frame = 0;
    double magnitude = 0.0;
  };
  std::vector<PoseJump> pose_schedule;
  int pose_dims = 6;

  int total_frames() const;
  Vec2d offset_at(std::int64_t frame) const;
  void validate() const;

  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_json_file(const std::filesystem::path& path);
};

struct GroundTruth {
  struct PerFrame {
    Vec2d gaze{0.0, 0.0};    // always inside [0,1]^2
    Vec2d offset{0.0, 0.0};
  };
  std::vector<PerFrame> frames;
  std::vector<std::int64_t> cut_frames;
  std::vector<std::int64_t> pose_event_frames;
};

struct Scenario {
  std::vector<Frame> frames;
  GroundTruth truth;
};

/// Render all frames and the ground truth for a scenario.
Scenario generate_scenario(const ScenarioConfig& config);

struct GazeTrace {
  std::vector<RoughGazeSample> samples;
  std::vector<HeadPose> poses;
  int blink_events = 0;
};

/// Rough gaze = truth + active offset + Gaussian noise, with blink
/// excursions and a per-frame head-pose stream.
GazeTrace simulate_rough_gaze(const GroundTruth& truth, const ScenarioConfig& config);

struct CorpusSummary {
  int frames = 0;
  int samples = 0;
  int cuts = 0;
};

/// Materialize frames (PGM), manifest.json, truth.json, gaze.csv, pose.csv.
CorpusSummary write_corpus(const std::filesystem::path& dir, const ScenarioConfig& config);

GroundTruth read_truth(const std::filesystem::path& truth_json);

}  // namespace vgaze
