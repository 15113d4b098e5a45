#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "vgaze/heatmap.hpp"

#include <random>

using namespace vgaze;
namespace vt = vgaze::testing;

TEST_CASE("downscale hits the working resolution") {
  Frame f = vt::make_frame(vt::noise_image(1280, 720, 7), 3, 125.0, true);
  Frame small = downscale(f, 68, 68);
  CHECK(small.width() == 68);
  CHECK(small.height() == 68);
  CHECK(small.index == 3);
  CHECK(small.timestamp_ms == 125.0);
  CHECK(small.is_key_frame);
}

TEST_CASE("downscale identity is bit-exact") {
  Frame f = vt::make_frame(vt::noise_image(68, 68, 11));
  Frame same = downscale(f, 68, 68);
  CHECK(same.pixels == f.pixels);
}

TEST_CASE("downscale keeps constant images constant") {
  Frame f = vt::make_frame(vt::constant_image(4, 4, 137));
  Frame small = downscale(f, 2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(small.pixels(r, c) == 137);

  Frame big = vt::make_frame(vt::constant_image(123, 77, 9));
  Frame out = downscale(big, 17, 31);
  CHECK((out.pixels.array() == 9).all());
}

TEST_CASE("downscale preserves the mean within one gray level") {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    Frame f = vt::make_frame(vt::noise_image(160, 90, seed));
    Frame small = downscale(f, 68, 68);
    const double mean_in = f.pixels.cast<double>().mean();
    const double mean_out = small.pixels.cast<double>().mean();
    CHECK(std::abs(mean_in - mean_out) <= 1.0);
  }
}

TEST_CASE("downscale rejects empty targets") {
  Frame f = vt::make_frame(vt::constant_image(4, 4, 0));
  CHECK_THROWS_AS(downscale(f, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(downscale(f, 4, 0), std::invalid_argument);
}

TEST_CASE("normalize_heatmap maps min-max onto [0,255] with half-up rounding") {
  Eigen::MatrixXd raw(1, 3);
  raw << 0.0, 0.5, 1.0;
  auto hm = normalize_heatmap(raw);
  CHECK(hm.values(0, 0) == 0);
  CHECK(hm.values(0, 1) == 128);
  CHECK(hm.values(0, 2) == 255);

  raw << -2.0, 0.0, 2.0;
  auto hm2 = normalize_heatmap(raw);
  CHECK(hm2.values(0, 0) == 0);
  CHECK(hm2.values(0, 1) == 128);
  CHECK(hm2.values(0, 2) == 255);
}

TEST_CASE("normalize_heatmap maps constant input to zero") {
  Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(5, 7, 3.7);
  auto hm = normalize_heatmap(raw);
  CHECK((hm.values.array() == 0).all());
}

TEST_CASE("normalize_heatmap rejects non-finite input") {
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(2, 2);
  raw(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(normalize_heatmap(raw), std::invalid_argument);
  raw(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(normalize_heatmap(raw), std::invalid_argument);
}

TEST_CASE("binarize keeps ties salient") {
  SaliencyHeatmap hm;
  hm.values.resize(1, 4);
  hm.values << 0, 127, 128, 255;
  BinaryMask m = binarize(hm, 128);
  CHECK(m(0, 0) == 0);
  CHECK(m(0, 1) == 0);
  CHECK(m(0, 2) == 1);
  CHECK(m(0, 3) == 1);

  CHECK((binarize(hm, 0).array() == 1).all());

  hm.values.setZero();
  CHECK((binarize(hm, 128).array() == 0).all());
}

TEST_CASE("binarize(normalize(x)) is invariant under positive affine maps") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  Eigen::MatrixXd raw(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c)
      raw(r, c) = val(rng);
  const BinaryMask base = binarize(normalize_heatmap(raw), 128);
  for (double a : {0.3, 2.0, 17.5}) {
    for (double b : {-4.0, 0.0, 123.0}) {
      const Eigen::MatrixXd mapped = a * raw.array() + b;
      CHECK(binarize(normalize_heatmap(mapped), 128) == base);
    }
  }
}

TEST_CASE("connected_components uses 8-connectivity") {
  SaliencyHeatmap hm;
  hm.values = GrayImage::Zero(4, 4);
  BinaryMask m = BinaryMask::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;  // diagonal touch -> one region
  auto regions = connected_components(m, hm);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].area_px == 2);

  m.setZero();
  m(0, 0) = 1;
  m(2, 0) = 1;  // separated by a zero row -> two regions
  regions = connected_components(m, hm);
  CHECK(regions.size() == 2);
}

TEST_CASE("connected_components peak is the max pixel, ties to smallest row-major index") {
  SaliencyHeatmap hm;
  hm.values = GrayImage::Zero(3, 3);
  hm.values(0, 1) = 200;
  hm.values(1, 0) = 200;
  BinaryMask m = BinaryMask::Ones(3, 3);
  auto regions = connected_components(m, hm);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].peak_y == 0);
  CHECK(regions[0].peak_x == 1);
}

TEST_CASE("connected_components matches the flood-fill oracle on random masks") {
  for (std::uint32_t seed = 0; seed < 300; ++seed) {
    const int w = 4 + seed % 29;
    const int h = 4 + (seed * 7) % 29;
    const BinaryMask m = vt::random_mask(w, h, seed, 0.25 + 0.5 * (seed % 5) / 4.0);
    SaliencyHeatmap hm;
    hm.values = vt::noise_image(w, h, seed + 999);
    const auto regions = connected_components(m, hm);
    const auto oracle = vt::flood_fill_oracle(m);
    REQUIRE(static_cast<int>(regions.size()) == oracle.count);
    std::vector<int> areas;
    for (const auto& r : regions) areas.push_back(r.area_px);
    std::sort(areas.begin(), areas.end());
    CHECK(areas == oracle.areas);
  }
}

TEST_CASE("compute_scs evaluates the concentration score with a zero clamp") {
  CHECK(compute_scs({}, 100) == 0.0);

  std::vector<Region> one{{1, 100, 0, 0}};
  CHECK(compute_scs(one, 1000) == doctest::Approx(0.9).epsilon(1e-12));

  std::vector<Region> three{{1, 200, 0, 0}, {2, 200, 0, 0}, {3, 200, 0, 0}};
  CHECK(compute_scs(three, 1000) == 0.0);  // raw -0.1 clamps to 0
}

TEST_CASE("SCS stays in [0,1] and is monotone in n and in area ratio") {
  const int total = 10000;
  double prev_for_ratio[21];
  for (int n = 1; n <= 20; ++n) {
    int step_idx = 0;
    double prev = 2.0;
    for (double ratio = 0.0; ratio <= 1.0001; ratio += 0.05, ++step_idx) {
      std::vector<Region> regions;
      int remaining = static_cast<int>(ratio * total);
      for (int i = 0; i < n; ++i) {
        const int a = std::max(0, remaining / (n - i));
        regions.push_back({i + 1, a, 0, 0});
        remaining -= a;
      }
      const double s = compute_scs(regions, total);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(s <= prev + 1e-12);                       // non-increasing in ratio
      if (n > 1) CHECK(s <= prev_for_ratio[step_idx] + 1e-12);  // non-increasing in n
      prev_for_ratio[step_idx] = n == 1 ? s : std::min(s, prev_for_ratio[step_idx]);
      prev = s;
    }
  }
}

TEST_CASE("extract_feature_vector maps peaks to bottom-left normalized coordinates") {
  SaliencyHeatmap hm;
  hm.values = GrayImage::Zero(68, 68);
  hm.values.block(0, 0, 2, 2).setConstant(255);
  auto fv = extract_feature_vector(hm, 128, 0.6, 42);
  REQUIRE(fv.has_value());
  CHECK(fv->frame_index == 42);
  CHECK(fv->n == 1);
  REQUIRE(fv->peaks.size() == 1);
  CHECK(std::abs(fv->peaks[0].x() - 0.02) < 0.02);
  CHECK(std::abs(fv->peaks[0].y() - 0.98) < 0.02);
}

TEST_CASE("extract_feature_vector rejects flat and sprawling heatmaps") {
  SaliencyHeatmap hm;
  hm.values = GrayImage::Zero(68, 68);
  CHECK_FALSE(extract_feature_vector(hm, 128, 0.6, 0).has_value());

  // One region covering 60% -> SCS = 1 - 0.6 = 0.4 < 0.6.
  hm.values = GrayImage::Zero(10, 10);
  for (int i = 0; i < 60; ++i) hm.values(i / 10, i % 10) = 255;
  CHECK_FALSE(extract_feature_vector(hm, 128, 0.6, 0).has_value());
}

TEST_CASE("feature-vector peaks always lie in the unit square") {
  for (std::uint32_t seed = 0; seed < 50; ++seed) {
    SaliencyHeatmap hm;
    hm.values = vt::noise_image(17 + seed % 40, 9 + seed % 23, seed);
    auto fv = extract_feature_vector(hm, 128, 0.0, 0);
    REQUIRE(fv.has_value());
    for (const auto& p : fv->peaks) {
      CHECK(p.x() >= 0.0);
      CHECK(p.x() <= 1.0);
      CHECK(p.y() >= 0.0);
      CHECK(p.y() <= 1.0);
    }
  }
}

TEST_CASE("spectral residual of a constant frame is all zero") {
  Frame f = vt::make_frame(vt::constant_image(68, 68, 128));
  auto hm = spectral_residual_saliency(f);
  CHECK((hm.values.array() == 0).all());
}

TEST_CASE("spectral residual peaks near an isolated bright square") {
  Frame f = vt::make_frame(vt::bright_square(68, 68, 20, 30, 4));
  auto hm = spectral_residual_saliency(f);
  int best_r = 0, best_c = 0, best = -1;
  for (int r = 0; r < 68; ++r)
    for (int c = 0; c < 68; ++c)
      if (hm.values(r, c) > best) {
        best = hm.values(r, c);
        best_r = r;
        best_c = c;
      }
  CHECK(best_r >= 18);
  CHECK(best_r <= 25);
  CHECK(best_c >= 28);
  CHECK(best_c <= 35);
}

TEST_CASE("spectral residual is deterministic") {
  Frame f = vt::make_frame(vt::noise_image(68, 68, 77));
  auto a = spectral_residual_saliency(f);
  auto b = spectral_residual_saliency(f);
  CHECK(a.values == b.values);
}

TEST_CASE("saliency argmax is stable across working resolutions") {
  // Bright-square corpus rendered large, downscaled to two working sizes;
  // the normalized argmax positions must agree within 0.08.
  std::mt19937 rng(123);
  std::uniform_int_distribution<int> row(40, 280), col(60, 560);
  for (int i = 0; i < 10; ++i) {
    const int r0 = row(rng), c0 = col(rng);
    Frame big = vt::make_frame(vt::bright_square(640, 360, r0, c0, 20));

    auto argmax_norm = [](const SaliencyHeatmap& hm) {
      int br = 0, bc = 0, best = -1;
      for (int r = 0; r < hm.height(); ++r)
        for (int c = 0; c < hm.width(); ++c)
          if (hm.values(r, c) > best) {
            best = hm.values(r, c);
            br = r;
            bc = c;
          }
      return pixel_to_screen(bc, br, hm.width(), hm.height());
    };

    const Vec2d a = argmax_norm(spectral_residual_saliency(downscale(big, 68, 68)));
    const Vec2d b = argmax_norm(spectral_residual_saliency(downscale(big, 160, 90)));
    CHECK((a - b).norm() <= 0.08);
  }
}
