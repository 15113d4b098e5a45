#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <vector>

namespace vgaze {

// Row-major 8-bit grids: images, heatmaps and binary masks all share this
// layout so pixel (row r, col c) is element (r, c).
using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BinaryMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec2d = Eigen::Vector2d;

/// One grayscale video frame of the input stream.
struct Frame {
  std::int64_t index = 0;
  double timestamp_ms = 0.0;
  bool is_key_frame = false;
  GrayImage pixels;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
};

enum class SaliencySource { BottomUp, TopDownExternal, Historical };

/// Normalized per-pixel saliency grid at working resolution.
struct SaliencyHeatmap {
  GrayImage values;
  SaliencySource source = SaliencySource::BottomUp;

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
};

/// One connected component of a binarized heatmap.
struct Region {
  int label = 0;     // positive, assigned in row-major discovery order
  int area_px = 0;
  int peak_x = 0;    // column of the max-saliency pixel (ties: smallest row-major index)
  int peak_y = 0;    // row of the max-saliency pixel
};

/// Per-frame saliency summary. Peaks (and any historical points) are in
/// normalized screen coordinates, origin at the bottom-left corner.
struct FeatureVector {
  std::int64_t frame_index = 0;
  int n = 0;
  double scs = 0.0;
  std::vector<Vec2d> peaks;
  std::vector<Vec2d> historical_points;
};

/// One uncalibrated on-screen gaze estimate. Position may fall outside
/// [0,1]^2 when the rough estimate overshoots the screen.
struct RoughGazeSample {
  double timestamp_ms = 0.0;
  std::int64_t frame_index = 0;
  Vec2d position{0.0, 0.0};
};

struct FrameAveragedGaze {
  std::int64_t frame_index = 0;
  Vec2d position{0.0, 0.0};
  int sample_count = 0;
};

enum class TransformSource { Initial, SceneCut, HeadMove };

/// 2D screen-space correction added to rough gaze estimates.
struct TransformVector {
  double dx = 0.0;
  double dy = 0.0;
  double computed_at_ms = 0.0;
  TransformSource source = TransformSource::Initial;
};

/// Face-posture sample; fixed dimensionality per session.
struct HeadPose {
  double timestamp_ms = 0.0;
  Eigen::VectorXd pose;
};

/// Past-user gaze points per frame, used as additional saliency evidence.
using HistoricalTrajectories = std::map<std::int64_t, std::vector<Vec2d>>;

inline const char* to_string(TransformSource s) {
  switch (s) {
    case TransformSource::Initial: return "Initial";
    case TransformSource::SceneCut: return "SceneCut";
    case TransformSource::HeadMove: return "HeadMove";
  }
  return "?";
}

}  // namespace vgaze
