#include "vgaze/pipeline.hpp"
#include "vgaze/sim.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

// User-facing errors (bad input, bad files) exit 1; anything else is an
// internal error and exits 2.
struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

vgaze::RunConfig make_run_config(const std::string& config_path, CLI::App* cmd,
                                 const std::string& orientation_flag,
                                 double face_rotation_deg, bool no_recalibration,
                                 bool no_zscore, const std::string& historical_csv,
                                 int window_n, double scs_threshold, int bin_threshold) {
  vgaze::RunConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = vgaze::run_config_from_json_file(config_path);
    } catch (const std::invalid_argument& e) {
      throw UserError(e.what());
    }
  }
  // Flags win over the config file.
  if (cmd->count("--orientation")) cfg.orientation = vgaze::orientation_from_string(orientation_flag);
  if (cmd->count("--face-rotation-deg")) cfg.face_rotation_deg = face_rotation_deg;
  if (no_recalibration) cfg.recalibration = false;
  if (no_zscore) cfg.zscore_enabled = false;
  if (cmd->count("--historical")) cfg.historical_csv = historical_csv;
  if (cmd->count("--window-n")) cfg.window_n = window_n;
  if (cmd->count("--scs-threshold")) cfg.scs_threshold = scs_threshold;
  if (cmd->count("--bin-threshold")) cfg.bin_threshold = bin_threshold;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vGaze implicit saliency-aware gaze-calibration pipeline"};
  app.require_subcommand(1);

  // simulate
  std::string scenario_path, out_dir;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic corpus from a scenario JSON");
  sim->add_option("scenario", scenario_path, "Scenario config JSON")->required();
  sim->add_option("out_dir", out_dir, "Output corpus directory")->required();

  // run
  std::string corpus_dir, run_out = "out.jsonl", config_path, orientation_flag;
  std::string historical_csv;
  double face_rotation_deg = 0.0, scs_threshold = 0.6;
  int window_n = 10, bin_threshold = 128;
  bool no_recalibration = false, no_zscore = false;
  auto* run = app.add_subcommand("run", "Run the calibration pipeline over a corpus");
  run->add_option("corpus_dir", corpus_dir, "Corpus directory")->required();
  run->add_option("-o,--out", run_out, "Output JSONL path");
  run->add_option("-c,--config", config_path, "Run config JSON");
  run->add_option("--orientation", orientation_flag,
                  "portrait | landscape_left | landscape_right");
  run->add_option("--face-rotation-deg", face_rotation_deg, "Static face rotation (landscape)");
  run->add_option("--historical", historical_csv, "Historical trajectories CSV");
  run->add_option("--window-n", window_n, "Calibration window length");
  run->add_option("--scs-threshold", scs_threshold, "SCS acceptance threshold");
  run->add_option("--bin-threshold", bin_threshold, "Heatmap binarization threshold");
  run->add_flag("--no-recalibration", no_recalibration, "Disable pose/scene-cut triggers");
  run->add_flag("--no-zscore", no_zscore, "Disable the z-score outlier filter");

  // evaluate
  std::string eval_jsonl, eval_truth, series_csv, report_path;
  double screen_diag_cm = 0.0, view_dist_cm = 30.0;
  auto* eval = app.add_subcommand("evaluate", "Compare a run against ground truth");
  eval->add_option("run_jsonl", eval_jsonl, "run output JSONL")->required();
  eval->add_option("truth_json", eval_truth, "truth.json from simulate")->required();
  eval->add_option("--screen-diag-cm", screen_diag_cm, "Screen diagonal for cm errors");
  eval->add_option("--view-dist-cm", view_dist_cm, "Viewing distance for angular errors");
  eval->add_option("--series", series_csv, "Write error-vs-time CSV here");
  eval->add_option("--report", report_path, "Write the JSON report here (default stdout)");

  // sweep
  std::string sweep_corpus, sweep_out;
  std::vector<int> sweep_bins{128, 170};
  std::vector<double> sweep_scs{0.6, 0.8};
  auto* sweep = app.add_subcommand("sweep", "Frames-cost table over threshold grids");
  sweep->add_option("corpus_dir", sweep_corpus, "Corpus directory")->required();
  sweep->add_option("--bin-thresholds", sweep_bins, "Binarization thresholds");
  sweep->add_option("--scs-thresholds", sweep_scs, "SCS thresholds");
  sweep->add_option("-o,--out", sweep_out, "Write the JSON table here (default stdout)");

  try {
    app.parse(argc, argv);

    if (*sim) {
      vgaze::ScenarioConfig cfg;
      try {
        cfg = vgaze::ScenarioConfig::from_json_file(scenario_path);
      } catch (const std::invalid_argument& e) {
        throw UserError(e.what());
      }
      const auto summary = vgaze::write_corpus(out_dir, cfg);
      std::cout << "corpus: " << summary.frames << " frames, " << summary.samples
                << " gaze samples, " << summary.cuts << " scene cuts -> " << out_dir << "\n";
    } else if (*run) {
      const auto cfg = make_run_config(config_path, run, orientation_flag, face_rotation_deg,
                                       no_recalibration, no_zscore, historical_csv,
                                       window_n, scs_threshold, bin_threshold);
      vgaze::TimingReport timing;
      vgaze::RunResult result;
      try {
        result = vgaze::run_pipeline_to_file(corpus_dir, cfg, run_out, &timing);
      } catch (const std::runtime_error& e) {
        throw UserError(e.what());
      }
      std::cout << "wrote " << result.gaze_records << " gaze records, " << result.transforms
                << " transforms -> " << run_out << "\n";
      timing.print(std::cout);
    } else if (*eval) {
      vgaze::EvaluateOptions opts;
      opts.screen_diag_cm = screen_diag_cm;
      opts.view_dist_cm = view_dist_cm;
      opts.series_csv = series_csv;
      vgaze::EvaluateReport rep;
      try {
        rep = vgaze::evaluate_run(eval_jsonl, eval_truth, opts);
      } catch (const std::runtime_error& e) {
        throw UserError(e.what());
      }
      const std::string text = rep.to_json();
      if (report_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(report_path);
        if (!out) throw UserError("cannot open for writing: " + report_path);
        out << text << "\n";
        std::cout << "report -> " << report_path << "\n";
      }
    } else if (*sweep) {
      vgaze::Corpus corpus;
      try {
        corpus = vgaze::load_corpus(sweep_corpus);
      } catch (const std::runtime_error& e) {
        throw UserError(e.what());
      }
      const auto cells =
          vgaze::sweep_thresholds(corpus, vgaze::RunConfig{}, sweep_bins, sweep_scs);
      const std::string text = vgaze::sweep_to_json(cells);
      if (sweep_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw UserError("cannot open for writing: " + sweep_out);
        out << text << "\n";
        std::cout << "table -> " << sweep_out << "\n";
      }
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
