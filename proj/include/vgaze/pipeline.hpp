#pragma once

#include "vgaze/config.hpp"
#include "vgaze/session.hpp"
#include "vgaze/timing.hpp"
#include "vgaze/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace vgaze {

struct FrameMeta {
  std::int64_t index = 0;
  double t_ms = 0.0;
  bool key = false;
  std::string file;
};

struct Corpus {
  std::filesystem::path dir;
  double fps = 30.0;
  int width = 0;
  int height = 0;
  std::vector<FrameMeta> frames;
  std::vector<RoughGazeSample> gaze;
  std::vector<HeadPose> poses;
};

Corpus load_corpus(const std::filesystem::path& dir);

/// Gaze trace CSV `t_ms,frame_index,x,y` (header required).
std::vector<RoughGazeSample> read_gaze_csv(const std::filesystem::path& path);

/// Historical trajectories CSV `user_id,frame_index,x,y` (header required).
HistoricalTrajectories read_historical_csv(const std::filesystem::path& path);

struct RunResult {
  int transforms = 0;
  int gaze_records = 0;
  TimingReport timing;
};

/// Feed the corpus through the session state machine, writing the
/// JSON-lines stream of calibrated gazes and transform updates.
RunResult run_pipeline(const Corpus& corpus, const RunConfig& config, std::ostream& out);
RunResult run_pipeline_to_file(const std::filesystem::path& corpus_dir,
                               const RunConfig& config,
                               const std::filesystem::path& out_jsonl,
                               TimingReport* timing = nullptr);

struct EvaluateOptions {
  double screen_diag_cm = 0.0;  // 0 = no cm conversion
  double view_dist_cm = 30.0;
  std::filesystem::path series_csv;  // empty = no series output
};

struct EvaluateReport {
  int n_samples = 0;
  double mean_error = 0.0;
  double median_error = 0.0;
  double p95_error = 0.0;
  double mean_error_cm = 0.0;
  double mean_error_deg = 0.0;
  int transforms = 0;
  double frames_cost_per_30_valid = 0.0;  // 0 when no window completed
  std::string to_json() const;
};

EvaluateReport evaluate_run(const std::filesystem::path& run_jsonl,
                            const std::filesystem::path& truth_json,
                            const EvaluateOptions& opts = {});

struct SweepCell {
  int bin_threshold = 0;
  double scs_threshold = 0.0;
  int frames_total = 0;
  int frames_valid = 0;
  double frames_cost_per_30_valid = 0.0;  // infinity -> -1
};

/// Score every frame of the corpus at each (bin, scs) threshold pair and
/// report the average frames consumed to collect 30 valid frames.
std::vector<SweepCell> sweep_thresholds(const Corpus& corpus, const RunConfig& base,
                                        const std::vector<int>& bin_thresholds,
                                        const std::vector<double>& scs_thresholds);

std::string sweep_to_json(const std::vector<SweepCell>& cells);

RunConfig run_config_from_json_file(const std::filesystem::path& path);

}  // namespace vgaze
