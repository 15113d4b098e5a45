#pragma once

#include "vgaze/types.hpp"

#include <optional>
#include <vector>

namespace vgaze {

/// Resample a frame by area-weighted (box filter) averaging.
/// Index, timestamp and key-frame flag are preserved.
Frame downscale(const Frame& frame, int target_w, int target_h);

/// Box-filter resample of a bare grid (used by pHash and the detector).
GrayImage resize_area(const GrayImage& src, int target_w, int target_h);

/// Affine min-max map of a real-valued grid onto [0, 255], rounded half-up.
/// A constant grid maps to all zeros. Throws std::invalid_argument on
/// non-finite input or an empty grid.
SaliencyHeatmap normalize_heatmap(const Eigen::MatrixXd& raw,
                                  SaliencySource source = SaliencySource::BottomUp);

/// Pixel is salient iff value >= threshold.
BinaryMask binarize(const SaliencyHeatmap& heatmap, int threshold);

/// 8-connectivity component labeling. Regions are ordered by their first
/// row-major pixel; each region carries its area and saliency-peak pixel.
std::vector<Region> connected_components(const BinaryMask& mask,
                                         const SaliencyHeatmap& heatmap);

/// Saliency Concentration Score: 1/log2(n+1) - A_s/A_T for n > 0, else 0,
/// clamped below at 0.
double compute_scs(const std::vector<Region>& regions, int total_area);

/// Map a heatmap pixel (col, row) on a W x H grid to normalized screen
/// coordinates with a bottom-left origin (pixel-center sampling).
inline Vec2d pixel_to_screen(int col, int row, int width, int height) {
  return {(col + 0.5) / width, 1.0 - (row + 0.5) / height};
}

/// Binarize, label, score. Returns nullopt when SCS falls below
/// scs_threshold (rejection is a normal outcome, not an error).
std::optional<FeatureVector> extract_feature_vector(const SaliencyHeatmap& heatmap,
                                                    int bin_threshold,
                                                    double scs_threshold,
                                                    std::int64_t frame_index);

/// Regions and score for a heatmap without the SCS gate; used where the
/// caller needs the raw score (history-assisted admission, sweeps).
struct ScoredHeatmap {
  std::vector<Region> regions;
  double scs = 0.0;
};
ScoredHeatmap score_heatmap(const SaliencyHeatmap& heatmap, int bin_threshold);

/// Built-in bottom-up detector: spectral residual of the grayscale frame.
/// Deterministic; expects the frame at working resolution.
SaliencyHeatmap spectral_residual_saliency(const Frame& frame);

}  // namespace vgaze
