#pragma once

#include "vgaze/types.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace vgaze::testing {

// -- independent oracles -----------------------------------------------------
// These deliberately avoid the library's implementations: the component
// oracle converges a label-propagation sweep to fixed point, the cluster
// oracle builds the full adjacency matrix and unions it.

struct OracleComponents {
  int count = 0;
  std::vector<int> areas;  // sorted ascending
};

inline OracleComponents flood_fill_oracle(const BinaryMask& mask) {
  const int h = static_cast<int>(mask.rows());
  const int w = static_cast<int>(mask.cols());
  std::vector<int> label(static_cast<std::size_t>(h) * w, -1);
  for (int i = 0; i < h * w; ++i)
    if (mask(i / w, i % w)) label[i] = i;

  // Propagate the minimum label across 8-neighbors until nothing changes.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const int i = r * w + c;
        if (label[i] < 0) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = r + dr, nc = c + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const int j = nr * w + nc;
            if (label[j] >= 0 && label[j] < label[i]) {
              label[i] = label[j];
              changed = true;
            }
          }
      }
  }

  OracleComponents out;
  std::vector<int> roots;
  for (int i = 0; i < h * w; ++i)
    if (label[i] == i) roots.push_back(i);
  out.count = static_cast<int>(roots.size());
  for (int root : roots) {
    int area = 0;
    for (int i = 0; i < h * w; ++i)
      if (label[i] == root) ++area;
    out.areas.push_back(area);
  }
  std::sort(out.areas.begin(), out.areas.end());
  return out;
}

using Partition = std::vector<std::vector<int>>;  // canonical: sorted members, sorted lists

inline Partition cluster_oracle(const std::vector<Vec2d>& pts, double epsilon, int min_size) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((pts[i] - pts[j]).norm() <= epsilon) parent[find(i)] = find(j);

  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  Partition out;
  for (auto& g : groups) {
    if (static_cast<int>(g.size()) < min_size || g.empty()) continue;
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -- fixture builders ---------------------------------------------------------

inline GrayImage constant_image(int w, int h, std::uint8_t value) {
  return GrayImage::Constant(h, w, value);
}

inline Frame make_frame(GrayImage px, std::int64_t index = 0, double t_ms = 0.0,
                        bool key = false) {
  Frame f;
  f.index = index;
  f.timestamp_ms = t_ms;
  f.is_key_frame = key;
  f.pixels = std::move(px);
  return f;
}

inline GrayImage noise_image(int w, int h, std::uint32_t seed, int lo = 30, int hi = 220) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  GrayImage img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      img(r, c) = static_cast<std::uint8_t>(dist(rng));
  return img;
}

inline GrayImage bright_square(int w, int h, int r0, int c0, int side,
                               std::uint8_t bg = 20, std::uint8_t fg = 240) {
  GrayImage img = GrayImage::Constant(h, w, bg);
  for (int r = r0; r < std::min(h, r0 + side); ++r)
    for (int c = c0; c < std::min(w, c0 + side); ++c)
      img(r, c) = fg;
  return img;
}

inline BinaryMask random_mask(int w, int h, std::uint32_t seed, double fill = 0.4) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  BinaryMask m(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      m(r, c) = dist(rng) < fill ? 1 : 0;
  return m;
}

}  // namespace vgaze::testing
