#include "vgaze/session.hpp"

#include "vgaze/calibration.hpp"
#include "vgaze/heatmap.hpp"

#include <chrono>
#include <stdexcept>
#include <utility>

namespace vgaze {

namespace {

// Accumulates elapsed wall time into a slot, when timing is enabled.
class StageTimer {
 public:
  explicit StageTimer(double* slot)
      : slot_(slot), start_(slot ? std::chrono::steady_clock::now()
                                 : std::chrono::steady_clock::time_point{}) {}
  ~StageTimer() {
    if (slot_)
      *slot_ += std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start_)
                    .count();
  }

 private:
  double* slot_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void RunConfig::validate() const {
  if (bin_threshold < 0 || bin_threshold > 255)
    throw std::invalid_argument("config: bin_threshold must be in 0..255");
  if (scs_threshold < 0.0 || scs_threshold > 1.0)
    throw std::invalid_argument("config: scs_threshold must be in [0,1]");
  if (window_n < 2) throw std::invalid_argument("config: window_n must be >= 2");
  if (cut_window_n < 1) throw std::invalid_argument("config: cut_window_n must be >= 1");
  if (bottom_up_frames < 0) throw std::invalid_argument("config: bottom_up_frames must be >= 0");
  if (cut_hash_threshold < 0 || cut_hash_threshold > 64)
    throw std::invalid_argument("config: cut_hash_threshold must be in 0..64");
  if (zscore_alpha <= 0.0) throw std::invalid_argument("config: zscore_alpha must be > 0");
  if (cluster_epsilon <= 0.0) throw std::invalid_argument("config: cluster_epsilon must be > 0");
  if (head_move_threshold < 0.0)
    throw std::invalid_argument("config: head_move_threshold must be >= 0");
  if (window_cap_multiplier < 1)
    throw std::invalid_argument("config: window_cap_multiplier must be >= 1");
  if (working_w < 1 || working_h < 1)
    throw std::invalid_argument("config: working resolution must be >= 1");
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "portrait") return Orientation::Portrait;
  if (s == "landscape_left") return Orientation::LandscapeLeft;
  if (s == "landscape_right") return Orientation::LandscapeRight;
  throw std::invalid_argument("unknown orientation: " + s);
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::Portrait: return "portrait";
    case Orientation::LandscapeLeft: return "landscape_left";
    case Orientation::LandscapeRight: return "landscape_right";
  }
  return "?";
}

Vec2d apply_transform(const RoughGazeSample& rough, const TransformVector& t) {
  return {rough.position.x() + t.dx, rough.position.y() + t.dy};
}

bool head_movement_detect(const HeadPose& prev, const HeadPose& cur, double threshold) {
  if (prev.pose.size() != cur.pose.size())
    throw std::invalid_argument("head_movement_detect: pose dimension mismatch");
  return (prev.pose - cur.pose).norm() > threshold;
}

Vec2d landscape_compensate(const Vec2d& gaze, double face_rotation_deg,
                           Orientation orientation, double kx, double y_floor, double cy) {
  if (orientation == Orientation::Portrait) return gaze;
  const double sign = orientation == Orientation::LandscapeLeft ? 1.0 : -1.0;
  Vec2d out = gaze;
  out.x() = gaze.x() - sign * kx * face_rotation_deg * gaze.x();
  if (gaze.y() < y_floor) out.y() = gaze.y() + cy;
  return out;
}

Session::Session(RunConfig cfg, HistoricalTrajectories hist)
    : cfg_(std::move(cfg)), hist_(std::move(hist)) {
  cfg_.validate();
}

void Session::check_timestamp(double t_ms) {
  if (t_ms < last_event_ms_)
    throw std::runtime_error("session: out-of-order event timestamp");
  last_event_ms_ = t_ms;
}

void Session::open_window(TransformSource source, SaliencySource saliency, int target_len) {
  Window w;
  w.source = source;
  w.saliency = saliency;
  w.target_len = target_len;
  window_ = std::move(w);
}

StepResult Session::on_pose(const HeadPose& pose) {
  check_timestamp(pose.timestamp_ms);
  StepResult result;
  if (last_pose_ && cfg_.recalibration &&
      head_movement_detect(*last_pose_, pose, cfg_.head_move_threshold)) {
    // The saliency type follows the attention mode at trigger time. A
    // movement during the bottom-up phase arms the skip rule: the next
    // scene-cut trigger inside that phase is ignored.
    SaliencySource sal = SaliencySource::TopDownExternal;
    if (mode().mode == Attention::BottomUp) {
      sal = SaliencySource::BottomUp;
      skip_next_cut_ = true;
    }
    open_window(TransformSource::HeadMove, sal, cfg_.window_n);
    ++head_move_windows_opened_;
  }
  last_pose_ = pose;
  return result;
}

StepResult Session::on_frame(const Frame& frame, const SaliencyHeatmap* external_td) {
  check_timestamp(frame.timestamp_ms);
  StepResult result;
  if (timing_) ++timing_->frames_processed;

  bool cut = false;
  if (frame.is_key_frame && prev_frame_) {
    StageTimer t(timing_ ? &timing_->temporal_ms : nullptr);
    cut = detect_scene_cut(*prev_frame_, frame, cfg_.cut_hash_threshold);
  }

  if (cut) {
    cut_frames_.push_back(frame.index);
    const bool in_bottom_up = since_cut_ >= 0 && since_cut_ + 1 < cfg_.bottom_up_frames;
    if (skip_next_cut_ && in_bottom_up) {
      skip_next_cut_ = false;
      since_cut_ = 0;
    } else {
      since_cut_ = 0;
      if (cfg_.recalibration) {
        open_window(TransformSource::SceneCut, SaliencySource::BottomUp, cfg_.cut_window_n);
        ++scene_cut_windows_opened_;
      }
    }
  } else {
    since_cut_ = since_cut_ < 0 ? 0 : since_cut_ + 1;
  }
  if (since_cut_ >= cfg_.bottom_up_frames) skip_next_cut_ = false;

  if (!transform_ && !window_)
    open_window(TransformSource::Initial,
                mode().mode == Attention::BottomUp ? SaliencySource::BottomUp
                                                   : SaliencySource::TopDownExternal,
                cfg_.window_n);

  prev_frame_ = frame;
  last_frame_index_ = frame.index;

  if (window_) {
    Window& w = *window_;
    ++w.frames_seen;

    Frame working = frame;
    if (frame.width() != cfg_.working_w || frame.height() != cfg_.working_h)
      working = downscale(frame, cfg_.working_w, cfg_.working_h);

    SaliencyHeatmap hm;
    if (w.saliency == SaliencySource::BottomUp || external_td == nullptr) {
      StageTimer t(timing_ ? &timing_->detection_ms : nullptr);
      hm = spectral_residual_saliency(working);
    } else {
      if (external_td->width() != cfg_.working_w || external_td->height() != cfg_.working_h)
        throw std::invalid_argument("session: external heatmap not at working resolution");
      hm = *external_td;
    }

    std::optional<FeatureVector> fv;
    {
      StageTimer t(timing_ ? &timing_->selection_ms : nullptr);
      fv = extract_feature_vector(hm, cfg_.bin_threshold, cfg_.scs_threshold, frame.index);
    }
    if (fv) {
      w.vectors.push_back(merge_historical(std::move(*fv), hist_));
      w.accepted_frames.insert(frame.index);
    } else {
      // History-assisted admission: a frame rejected on SCS alone still
      // carries usable evidence when enough past-user points exist for it.
      auto it = hist_.find(frame.index);
      if (it != hist_.end() &&
          static_cast<int>(it->second.size()) >= cfg_.hist_min_points) {
        FeatureVector hv;
        hv.frame_index = frame.index;
        hv.scs = score_heatmap(hm, cfg_.bin_threshold).scs;
        hv.historical_points = it->second;
        w.vectors.push_back(std::move(hv));
        w.accepted_frames.insert(frame.index);
      }
    }
    result.new_transform = try_complete(frame.timestamp_ms);
  }
  return result;
}

StepResult Session::on_gaze(const RoughGazeSample& sample) {
  check_timestamp(sample.timestamp_ms);
  StepResult result;

  Vec2d pos = sample.position;
  if (cfg_.orientation != Orientation::Portrait)
    pos = landscape_compensate(pos, cfg_.face_rotation_deg, cfg_.orientation,
                               cfg_.landscape_kx, cfg_.landscape_y_floor, cfg_.landscape_cy);

  RoughGazeSample adjusted = sample;
  adjusted.position = pos;

  EmittedGaze out;
  out.t_ms = sample.timestamp_ms;
  out.frame = sample.frame_index;
  out.calibrated = transform_.has_value();
  const Vec2d emitted = transform_ ? apply_transform(adjusted, *transform_) : pos;
  out.x = emitted.x();
  out.y = emitted.y();
  result.gazes.push_back(out);

  if (window_ && window_->accepted_frames.count(sample.frame_index)) {
    window_->samples.push_back(adjusted);
    window_->frames_with_samples.insert(sample.frame_index);
    result.new_transform = try_complete(sample.timestamp_ms);
  }
  return result;
}

std::optional<TransformVector> Session::try_complete(double now_ms) {
  if (!window_) return std::nullopt;
  StageTimer timer(timing_ ? &timing_->calibration_ms : nullptr);
  Window& w = *window_;
  const int cap = cfg_.window_cap_multiplier * w.target_len;

  if (static_cast<int>(w.vectors.size()) < w.target_len) return std::nullopt;
  if (static_cast<int>(w.frames_with_samples.size()) < w.target_len) {
    if (static_cast<int>(w.vectors.size()) >= cap) window_.reset();
    return std::nullopt;
  }

  std::vector<RoughGazeSample> filtered =
      cfg_.zscore_enabled ? zscore_filter(w.samples, cfg_.zscore_alpha) : w.samples;
  std::optional<Vec2d> vc;
  if (!filtered.empty()) {
    const auto gazes = average_per_frame(filtered);
    if (static_cast<int>(gazes.size()) >= w.target_len)
      vc = compute_transform(w.vectors, gazes, cfg_.cluster_epsilon,
                             cfg_.effective_min_size(w.target_len));
  }

  if (!vc) {
    // Deferral: keep collecting until the hard cap, then give up on this
    // window so pathological content cannot pin it open forever.
    if (static_cast<int>(w.vectors.size()) >= cap) window_.reset();
    return std::nullopt;
  }

  TransformVector t;
  t.dx = vc->x();
  t.dy = vc->y();
  t.computed_at_ms = now_ms;
  t.source = w.source;
  last_window_stats_ = {w.frames_seen, static_cast<int>(w.vectors.size())};
  transform_ = t;
  window_.reset();
  return t;
}

}  // namespace vgaze
