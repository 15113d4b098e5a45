#include "vgaze/heatmap.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace vgaze {

namespace {

std::uint8_t round_half_up(double v) {
  double r = std::floor(v + 0.5);
  if (r < 0.0) r = 0.0;
  if (r > 255.0) r = 255.0;
  return static_cast<std::uint8_t>(r);
}

}  // namespace

GrayImage resize_area(const GrayImage& src, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1)
    throw std::invalid_argument("resize_area: target dimensions must be >= 1");
  const int sw = static_cast<int>(src.cols());
  const int sh = static_cast<int>(src.rows());
  if (sw == target_w && sh == target_h) return src;

  const double sx = static_cast<double>(sw) / target_w;
  const double sy = static_cast<double>(sh) / target_h;
  GrayImage out(target_h, target_w);
  for (int tr = 0; tr < target_h; ++tr) {
    const double y0 = tr * sy;
    const double y1 = (tr + 1) * sy;
    const int ry0 = static_cast<int>(std::floor(y0));
    const int ry1 = std::min(sh - 1, static_cast<int>(std::ceil(y1)) - 1);
    for (int tc = 0; tc < target_w; ++tc) {
      const double x0 = tc * sx;
      const double x1 = (tc + 1) * sx;
      const int rx0 = static_cast<int>(std::floor(x0));
      const int rx1 = std::min(sw - 1, static_cast<int>(std::ceil(x1)) - 1);
      double acc = 0.0;
      double area = 0.0;
      for (int r = ry0; r <= ry1; ++r) {
        const double wy = std::min<double>(r + 1, y1) - std::max<double>(r, y0);
        for (int c = rx0; c <= rx1; ++c) {
          const double wx = std::min<double>(c + 1, x1) - std::max<double>(c, x0);
          const double w = wx * wy;
          acc += w * src(r, c);
          area += w;
        }
      }
      out(tr, tc) = round_half_up(acc / area);
    }
  }
  return out;
}

Frame downscale(const Frame& frame, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1)
    throw std::invalid_argument("downscale: target dimensions must be >= 1");
  if (frame.width() < 1 || frame.height() < 1)
    throw std::invalid_argument("downscale: empty frame");
  Frame out;
  out.index = frame.index;
  out.timestamp_ms = frame.timestamp_ms;
  out.is_key_frame = frame.is_key_frame;
  out.pixels = resize_area(frame.pixels, target_w, target_h);
  return out;
}

SaliencyHeatmap normalize_heatmap(const Eigen::MatrixXd& raw, SaliencySource source) {
  if (raw.size() == 0) throw std::invalid_argument("normalize_heatmap: empty grid");
  if (!raw.allFinite()) throw std::invalid_argument("normalize_heatmap: non-finite value");

  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  SaliencyHeatmap hm;
  hm.source = source;
  hm.values.resize(raw.rows(), raw.cols());
  if (hi == lo) {
    hm.values.setZero();
    return hm;
  }
  const double scale = 255.0 / (hi - lo);
  for (Eigen::Index r = 0; r < raw.rows(); ++r)
    for (Eigen::Index c = 0; c < raw.cols(); ++c)
      hm.values(r, c) = round_half_up((raw(r, c) - lo) * scale);
  return hm;
}

BinaryMask binarize(const SaliencyHeatmap& heatmap, int threshold) {
  BinaryMask mask(heatmap.values.rows(), heatmap.values.cols());
  for (Eigen::Index r = 0; r < mask.rows(); ++r)
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      mask(r, c) = heatmap.values(r, c) >= threshold ? 1 : 0;
  return mask;
}

std::vector<Region> connected_components(const BinaryMask& mask,
                                         const SaliencyHeatmap& heatmap) {
  if (mask.rows() != heatmap.values.rows() || mask.cols() != heatmap.values.cols())
    throw std::invalid_argument("connected_components: dimension mismatch");
  const int h = static_cast<int>(mask.rows());
  const int w = static_cast<int>(mask.cols());

  std::vector<int> labels(static_cast<std::size_t>(h) * w, 0);
  std::vector<Region> regions;
  std::vector<int> stack;
  int next_label = 1;

  for (int r0 = 0; r0 < h; ++r0) {
    for (int c0 = 0; c0 < w; ++c0) {
      const int idx0 = r0 * w + c0;
      if (!mask(r0, c0) || labels[idx0]) continue;

      Region reg;
      reg.label = next_label++;
      int best_val = -1;
      int best_idx = -1;
      stack.clear();
      stack.push_back(idx0);
      labels[idx0] = reg.label;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / w;
        const int c = idx % w;
        ++reg.area_px;
        const int v = heatmap.values(r, c);
        if (v > best_val || (v == best_val && idx < best_idx)) {
          best_val = v;
          best_idx = idx;
        }
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nr = r + dr;
            const int nc = c + dc;
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const int nidx = nr * w + nc;
            if (mask(nr, nc) && !labels[nidx]) {
              labels[nidx] = reg.label;
              stack.push_back(nidx);
            }
          }
        }
      }
      reg.peak_y = best_idx / w;
      reg.peak_x = best_idx % w;
      regions.push_back(reg);
    }
  }
  return regions;
}

double compute_scs(const std::vector<Region>& regions, int total_area) {
  if (total_area < 1) throw std::invalid_argument("compute_scs: total_area must be >= 1");
  const std::size_t n = regions.size();
  if (n == 0) return 0.0;
  long long salient = 0;
  for (const Region& r : regions) salient += r.area_px;
  const double s = 1.0 / std::log2(static_cast<double>(n) + 1.0) -
                   static_cast<double>(salient) / total_area;
  return s < 0.0 ? 0.0 : s;
}

ScoredHeatmap score_heatmap(const SaliencyHeatmap& heatmap, int bin_threshold) {
  ScoredHeatmap out;
  const BinaryMask mask = binarize(heatmap, bin_threshold);
  out.regions = connected_components(mask, heatmap);
  out.scs = compute_scs(out.regions, heatmap.width() * heatmap.height());
  return out;
}

std::optional<FeatureVector> extract_feature_vector(const SaliencyHeatmap& heatmap,
                                                    int bin_threshold,
                                                    double scs_threshold,
                                                    std::int64_t frame_index) {
  const ScoredHeatmap scored = score_heatmap(heatmap, bin_threshold);
  if (scored.scs < scs_threshold) return std::nullopt;

  FeatureVector fv;
  fv.frame_index = frame_index;
  fv.n = static_cast<int>(scored.regions.size());
  fv.scs = scored.scs;
  fv.peaks.reserve(scored.regions.size());
  for (const Region& r : scored.regions)
    fv.peaks.push_back(pixel_to_screen(r.peak_x, r.peak_y, heatmap.width(), heatmap.height()));
  return fv;
}

namespace {

// Dense DFT matrix, cached by size. At working resolution the transform is
// two small complex matrix products, well under the per-frame budget.
std::shared_ptr<const Eigen::MatrixXcd> fourier_matrix(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Eigen::MatrixXcd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  auto m = std::make_shared<Eigen::MatrixXcd>(n, n);
  const double step = -2.0 * std::numbers::pi / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      (*m)(j, k) = std::polar(1.0, step * static_cast<double>(j) * k);
  cache.emplace(n, m);
  return m;
}

Eigen::MatrixXd box_filter3(const Eigen::MatrixXd& src) {
  const int h = static_cast<int>(src.rows());
  const int w = static_cast<int>(src.cols());
  Eigen::MatrixXd out(h, w);
  for (int r = 0; r < h; ++r) {
    const int r0 = std::max(0, r - 1);
    const int r1 = std::min(h - 1, r + 1);
    for (int c = 0; c < w; ++c) {
      const int c0 = std::max(0, c - 1);
      const int c1 = std::min(w - 1, c + 1);
      out(r, c) = src.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1).mean();
    }
  }
  return out;
}

}  // namespace

SaliencyHeatmap spectral_residual_saliency(const Frame& frame) {
  const int h = frame.height();
  const int w = frame.width();
  if (h < 1 || w < 1) throw std::invalid_argument("spectral_residual_saliency: empty frame");

  // A constant frame has no saliency; the residual of a flat spectrum is
  // pure numeric ripple, so short-circuit to the all-zero map.
  if ((frame.pixels.array() == frame.pixels(0, 0)).all()) {
    SaliencyHeatmap hm;
    hm.source = SaliencySource::BottomUp;
    hm.values = GrayImage::Zero(h, w);
    return hm;
  }

  Eigen::MatrixXcd img(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      img(r, c) = std::complex<double>(frame.pixels(r, c), 0.0);

  const auto fh = fourier_matrix(h);
  const auto fw = fourier_matrix(w);
  const Eigen::MatrixXcd spectrum = (*fh) * img * fw->transpose();

  // Floor amplitudes relative to the spectrum peak: synthetic images produce
  // exact spectral zeros whose raw log would swamp the residual.
  double max_amp = 0.0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      max_amp = std::max(max_amp, std::abs(spectrum(r, c)));
  const double amp_floor = std::max(max_amp * 1e-4, 1e-300);

  Eigen::MatrixXd log_amp(h, w);
  Eigen::MatrixXd phase(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      log_amp(r, c) = std::log(std::max(std::abs(spectrum(r, c)), amp_floor));
      phase(r, c) = std::arg(spectrum(r, c));
    }
  }

  const Eigen::MatrixXd residual = log_amp - box_filter3(log_amp);

  Eigen::MatrixXcd back(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      back(r, c) = std::polar(std::exp(residual(r, c)), phase(r, c));

  const Eigen::MatrixXcd spatial = fh->conjugate() * back * fw->adjoint() /
                                   (static_cast<double>(h) * w);

  Eigen::MatrixXd energy(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      energy(r, c) = std::norm(spatial(r, c));
  energy = box_filter3(energy);

  // A constant frame leaves only numeric ripple around the DC term; treat a
  // relatively flat map as no saliency rather than stretching the ripple.
  const double lo = energy.minCoeff();
  const double hi = energy.maxCoeff();
  if (hi - lo <= 1e-6 * std::max(hi, 1e-300)) {
    SaliencyHeatmap hm;
    hm.source = SaliencySource::BottomUp;
    hm.values = GrayImage::Zero(h, w);
    return hm;
  }
  return normalize_heatmap(energy, SaliencySource::BottomUp);
}

}  // namespace vgaze
