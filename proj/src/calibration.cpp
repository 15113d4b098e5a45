#include "vgaze/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace vgaze {

std::vector<RoughGazeSample> zscore_filter(const std::vector<RoughGazeSample>& samples,
                                           double alpha) {
  if (samples.empty()) throw std::invalid_argument("zscore_filter: empty sample list");
  const double n = static_cast<double>(samples.size());

  Vec2d mean{0.0, 0.0};
  for (const auto& s : samples) mean += s.position;
  mean /= n;

  Vec2d var{0.0, 0.0};
  for (const auto& s : samples) {
    const Vec2d d = s.position - mean;
    var += d.cwiseProduct(d);
  }
  const Vec2d sigma = (var / n).cwiseSqrt();

  std::vector<RoughGazeSample> kept;
  kept.reserve(samples.size());
  for (const auto& s : samples) {
    bool outlier = false;
    for (int a = 0; a < 2; ++a) {
      if (sigma[a] == 0.0) continue;
      if (std::abs((s.position[a] - mean[a]) / sigma[a]) > alpha) outlier = true;
    }
    if (!outlier) kept.push_back(s);
  }
  return kept;
}

std::vector<FrameAveragedGaze> average_per_frame(const std::vector<RoughGazeSample>& samples) {
  std::map<std::int64_t, FrameAveragedGaze> groups;
  for (const auto& s : samples) {
    auto& g = groups[s.frame_index];
    g.frame_index = s.frame_index;
    g.position += s.position;
    ++g.sample_count;
  }
  std::vector<FrameAveragedGaze> out;
  out.reserve(groups.size());
  for (auto& [idx, g] : groups) {
    g.position /= g.sample_count;
    out.push_back(g);
  }
  return out;
}

std::vector<Cluster> cluster_points(const std::vector<Vec2d>& points,
                                    double epsilon, int min_size) {
  if (epsilon <= 0.0) throw std::invalid_argument("cluster_points: epsilon must be > 0");
  const int n = static_cast<int>(points.size());
  const double eps2 = epsilon * epsilon;

  std::vector<int> component(n, -1);
  std::vector<int> stack;
  std::vector<Cluster> clusters;
  for (int i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    Cluster cl;
    stack.clear();
    stack.push_back(i);
    component[i] = static_cast<int>(clusters.size());
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      cl.members.push_back(p);
      for (int q = 0; q < n; ++q) {
        if (component[q] >= 0) continue;
        if ((points[p] - points[q]).squaredNorm() <= eps2) {
          component[q] = component[i];
          stack.push_back(q);
        }
      }
    }
    std::sort(cl.members.begin(), cl.members.end());
    if (static_cast<int>(cl.members.size()) < min_size) continue;
    Vec2d sum{0.0, 0.0};
    for (int m : cl.members) sum += points[m];
    cl.centroid = sum / static_cast<double>(cl.members.size());
    clusters.push_back(std::move(cl));
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    return a.members.front() < b.members.front();
  });
  return clusters;
}

std::optional<Vec2d> compute_transform(const std::vector<FeatureVector>& vectors,
                                       const std::vector<FrameAveragedGaze>& gazes,
                                       double epsilon, int min_size) {
  std::vector<Vec2d> saliency_points;
  for (const auto& v : vectors) {
    saliency_points.insert(saliency_points.end(), v.peaks.begin(), v.peaks.end());
    saliency_points.insert(saliency_points.end(), v.historical_points.begin(),
                           v.historical_points.end());
  }
  std::vector<Vec2d> gaze_points;
  gaze_points.reserve(gazes.size());
  for (const auto& g : gazes) gaze_points.push_back(g.position);

  const auto sal_clusters = cluster_points(saliency_points, epsilon, min_size);
  if (sal_clusters.empty()) return std::nullopt;
  const auto gaze_clusters = cluster_points(gaze_points, epsilon, min_size);
  if (gaze_clusters.empty()) return std::nullopt;

  return sal_clusters.front().centroid - gaze_clusters.front().centroid;
}

FeatureVector merge_historical(FeatureVector vector, const HistoricalTrajectories& hist) {
  auto it = hist.find(vector.frame_index);
  if (it == hist.end()) return vector;
  vector.historical_points.insert(vector.historical_points.end(),
                                  it->second.begin(), it->second.end());
  return vector;
}

}  // namespace vgaze
