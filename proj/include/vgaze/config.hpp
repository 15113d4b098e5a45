#pragma once

#include <cmath>
#include <string>

namespace vgaze {

enum class Orientation { Portrait, LandscapeLeft, LandscapeRight };

/// All pipeline tunables with their defaults.
struct RunConfig {
  int bin_threshold = 128;
  double scs_threshold = 0.6;
  int window_n = 10;
  int cut_window_n = 5;
  int bottom_up_frames = 5;
  int cut_hash_threshold = 10;
  double zscore_alpha = 3.0;
  double cluster_epsilon = 0.1;
  int cluster_min_size = 0;        // 0 -> ceil(window target / 3)
  double head_move_threshold = 0.005;
  int window_cap_multiplier = 4;
  int working_w = 68;
  int working_h = 68;
  int hist_min_points = 3;         // historical points needed to admit an SCS-rejected frame

  Orientation orientation = Orientation::Portrait;
  double landscape_kx = 0.002;     // x-correction gain per degree
  double landscape_y_floor = 0.3;
  double landscape_cy = 0.03;
  double face_rotation_deg = 0.0;  // static per run; the simulator has no face model

  bool recalibration = true;       // pose / scene-cut triggers enabled
  bool zscore_enabled = true;
  std::string historical_csv;

  int effective_min_size(int window_target) const {
    if (cluster_min_size > 0) return cluster_min_size;
    return static_cast<int>(std::ceil(window_target / 3.0));
  }

  void validate() const;
};

Orientation orientation_from_string(const std::string& s);
const char* to_string(Orientation o);

}  // namespace vgaze
