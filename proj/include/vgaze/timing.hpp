#pragma once

#include <iosfwd>

namespace vgaze {

/// Wall-clock per pipeline stage, accumulated over one run.
struct TimingReport {
  double detection_ms = 0.0;    // bottom-up saliency
  double selection_ms = 0.0;    // binarize + components + SCS + feature vector
  double temporal_ms = 0.0;     // pHash / scene-cut checks
  double calibration_ms = 0.0;  // windows, clustering, transforms
  double io_ms = 0.0;
  int frames_processed = 0;

  void print(std::ostream& os) const;
};

}  // namespace vgaze
