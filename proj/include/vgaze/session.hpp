#pragma once

#include "vgaze/config.hpp"
#include "vgaze/temporal.hpp"
#include "vgaze/timing.hpp"
#include "vgaze/types.hpp"

#include <optional>
#include <set>
#include <vector>

namespace vgaze {

/// Component-wise addition; no clamping to [0,1]^2.
Vec2d apply_transform(const RoughGazeSample& rough, const TransformVector& t);

/// True iff the Euclidean distance between pose vectors exceeds threshold
/// (strict). Throws std::invalid_argument on dimension mismatch.
bool head_movement_detect(const HeadPose& prev, const HeadPose& cur, double threshold);

/// Landscape posture correction: the x error grows with the face rotation
/// and with distance from the origin along x, the y error is a constant
/// droop below a floor. Portrait input is returned unchanged.
Vec2d landscape_compensate(const Vec2d& gaze, double face_rotation_deg,
                           Orientation orientation, double kx, double y_floor, double cy);

struct EmittedGaze {
  double t_ms = 0.0;
  std::int64_t frame = 0;
  double x = 0.0;
  double y = 0.0;
  bool calibrated = false;
};

struct StepResult {
  std::vector<EmittedGaze> gazes;
  std::optional<TransformVector> new_transform;
};

/// Stats of the calibration window that produced a transform.
struct WindowStats {
  int frames_seen = 0;
  int frames_accepted = 0;
};

/// The live tracker: applies the current transform to every rough sample,
/// watches head movement and scene cuts, and runs the opportunistic
/// recalibration state machine. Single-writer; events must arrive in
/// non-decreasing timestamp order.
class Session {
 public:
  explicit Session(RunConfig cfg, HistoricalTrajectories hist = {});

  /// external_td, when non-null, supplies the top-down heatmap for this
  /// frame; bottom-up saliency is always computed internally.
  StepResult on_frame(const Frame& frame, const SaliencyHeatmap* external_td = nullptr);
  StepResult on_gaze(const RoughGazeSample& sample);
  StepResult on_pose(const HeadPose& pose);

  const std::optional<TransformVector>& transform() const { return transform_; }
  // Before the first frame the session behaves as freshly post-cut.
  AttentionMode mode() const {
    return attention_mode(since_cut_ < 0 ? 0 : since_cut_, cfg_.bottom_up_frames);
  }
  bool window_open() const { return window_.has_value(); }
  std::optional<TransformSource> window_source() const {
    if (!window_) return std::nullopt;
    return window_->source;
  }
  int scene_cut_windows_opened() const { return scene_cut_windows_opened_; }
  int head_move_windows_opened() const { return head_move_windows_opened_; }
  const std::vector<std::int64_t>& cut_frames() const { return cut_frames_; }
  const WindowStats& last_window_stats() const { return last_window_stats_; }
  const RunConfig& config() const { return cfg_; }

  /// Optional per-stage timing accumulator; not owned.
  void set_timing(TimingReport* timing) { timing_ = timing; }

 private:
  struct Window {
    TransformSource source = TransformSource::Initial;
    SaliencySource saliency = SaliencySource::BottomUp;
    int target_len = 0;
    std::vector<FeatureVector> vectors;
    std::vector<RoughGazeSample> samples;
    std::set<std::int64_t> accepted_frames;
    std::set<std::int64_t> frames_with_samples;
    int frames_seen = 0;
  };

  void check_timestamp(double t_ms);
  void open_window(TransformSource source, SaliencySource saliency, int target_len);
  std::optional<TransformVector> try_complete(double now_ms);

  RunConfig cfg_;
  HistoricalTrajectories hist_;
  std::optional<TransformVector> transform_;
  std::optional<Window> window_;
  std::optional<Frame> prev_frame_;
  std::optional<HeadPose> last_pose_;
  std::int64_t last_frame_index_ = -1;
  double last_event_ms_ = -1.0;
  int since_cut_ = -1;              // -1 until the first frame arrives
  bool skip_next_cut_ = false;
  int scene_cut_windows_opened_ = 0;
  int head_move_windows_opened_ = 0;
  std::vector<std::int64_t> cut_frames_;
  WindowStats last_window_stats_;
  TimingReport* timing_ = nullptr;
};

}  // namespace vgaze
