#pragma once

#include "vgaze/types.hpp"

#include <optional>
#include <vector>

namespace vgaze {

/// Drop samples whose per-axis z-score (population sigma over the window)
/// exceeds alpha in absolute value on either axis. sigma = 0 on an axis
/// means no sample is an outlier on that axis.
std::vector<RoughGazeSample> zscore_filter(const std::vector<RoughGazeSample>& samples,
                                           double alpha);

/// Arithmetic mean per distinct frame_index, ordered by frame_index.
std::vector<FrameAveragedGaze> average_per_frame(const std::vector<RoughGazeSample>& samples);

struct Cluster {
  std::vector<int> members;   // indices into the input, ascending
  Vec2d centroid{0.0, 0.0};
};

/// Radius-graph density clustering: points are neighbors iff their Euclidean
/// distance is <= epsilon, clusters are connected components of the neighbor
/// graph, components smaller than min_size are discarded. Output ordered by
/// size descending, ties by smallest member index.
std::vector<Cluster> cluster_points(const std::vector<Vec2d>& points,
                                    double epsilon, int min_size);

/// Offset between the largest saliency-point cluster centroid and the
/// largest gaze cluster centroid: V_c = C_s - C_g. Saliency points are the
/// pooled peaks plus historical points of all vectors. Returns nullopt when
/// either side yields no admissible cluster (deferral).
std::optional<Vec2d> compute_transform(const std::vector<FeatureVector>& vectors,
                                       const std::vector<FrameAveragedGaze>& gazes,
                                       double epsilon, int min_size);

/// Append the trajectories recorded for this frame to the vector's
/// historical points. Missing frame entry leaves the vector unchanged.
FeatureVector merge_historical(FeatureVector vector, const HistoricalTrajectories& hist);

}  // namespace vgaze
