#pragma once

#include "vgaze/types.hpp"

#include <cstdint>

namespace vgaze {

struct PerceptualHash {
  std::uint64_t bits = 0;
  friend bool operator==(const PerceptualHash&, const PerceptualHash&) = default;
};

enum class Attention { BottomUp, TopDown };

struct AttentionMode {
  Attention mode = Attention::BottomUp;
  int since_cut_frames = 0;
};

/// DCT-based perceptual hash: box-resize to 32x32, 2D DCT, low-frequency
/// 8x8 block with the DC term swapped for the next coefficient, each bit
/// set iff its coefficient exceeds the median of the 64 selected values.
PerceptualHash phash(const Frame& frame);

/// Population count of XOR; 0..64.
int hamming(PerceptualHash a, PerceptualHash b);

/// True iff the hash distance between the frames exceeds cut_threshold.
/// Callers invoke this only on key frames.
bool detect_scene_cut(const Frame& prev, const Frame& key, int cut_threshold);

/// BottomUp iff since_cut_frames < bottom_up_window.
AttentionMode attention_mode(int since_cut_frames, int bottom_up_window);

}  // namespace vgaze
