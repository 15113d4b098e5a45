#include "vgaze/temporal.hpp"

#include "vgaze/heatmap.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vgaze {

namespace {

constexpr int kHashRes = 32;

// Orthonormal DCT-II basis, computed once.
const Eigen::MatrixXd& dct_basis() {
  static const Eigen::MatrixXd basis = [] {
    Eigen::MatrixXd d(kHashRes, kHashRes);
    const double norm0 = std::sqrt(1.0 / kHashRes);
    const double norm = std::sqrt(2.0 / kHashRes);
    for (int j = 0; j < kHashRes; ++j)
      for (int k = 0; k < kHashRes; ++k)
        d(j, k) = (j == 0 ? norm0 : norm) *
                  std::cos(std::numbers::pi * (2.0 * k + 1.0) * j / (2.0 * kHashRes));
    return d;
  }();
  return basis;
}

}  // namespace

PerceptualHash phash(const Frame& frame) {
  if (frame.width() < 1 || frame.height() < 1)
    throw std::invalid_argument("phash: empty frame");
  const GrayImage small = resize_area(frame.pixels, kHashRes, kHashRes);
  Eigen::MatrixXd img = small.cast<double>();
  const Eigen::MatrixXd coeffs = dct_basis() * img * dct_basis().transpose();

  // 64 values: the 8x8 low-frequency block, row-major, with the DC term
  // replaced by the first coefficient outside the block.
  std::array<double, 64> vals;
  int i = 0;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      vals[i++] = (r == 0 && c == 0) ? coeffs(0, 8) : coeffs(r, c);

  std::array<double, 64> sorted = vals;
  std::nth_element(sorted.begin(), sorted.begin() + 31, sorted.end());
  const double lo_mid = sorted[31];
  std::nth_element(sorted.begin(), sorted.begin() + 32, sorted.end());
  const double median = 0.5 * (lo_mid + sorted[32]);

  PerceptualHash h;
  for (int b = 0; b < 64; ++b)
    if (vals[b] > median) h.bits |= (std::uint64_t{1} << b);
  return h;
}

int hamming(PerceptualHash a, PerceptualHash b) {
  return std::popcount(a.bits ^ b.bits);
}

bool detect_scene_cut(const Frame& prev, const Frame& key, int cut_threshold) {
  return hamming(phash(prev), phash(key)) > cut_threshold;
}

AttentionMode attention_mode(int since_cut_frames, int bottom_up_window) {
  if (since_cut_frames < 0 || bottom_up_window < 0)
    throw std::invalid_argument("attention_mode: counts must be non-negative");
  AttentionMode m;
  m.since_cut_frames = since_cut_frames;
  m.mode = since_cut_frames < bottom_up_window ? Attention::BottomUp : Attention::TopDown;
  return m;
}

}  // namespace vgaze
