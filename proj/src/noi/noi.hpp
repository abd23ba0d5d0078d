#pragma once

#include <string>
#include <vector>

#include "detection/detect.hpp"
#include "noi/raster.hpp"
#include "snapshot/bundle.hpp"

namespace rlf::noi {

struct RegionPair {
  Raster visible;
  Raster hidden;
  snapshot::BBox region;  // device px
  std::string failure_id;
};

struct NoiOptions {
  int channel_threshold = 0;
  long min_diff_pixels = 1;
};

struct NoiResult {
  detection::Observability observability = detection::Observability::kNoi;
  long differing_pixels = 0;
};

// Pixels inside the region where any channel differs by more than the
// threshold. The region is clipped to whole pixels. Throws
// kDimensionMismatch when the rasters differ in size or the region leaves
// them, kInvalidArgument for a threshold outside 0..255.
NoiResult classify_noi(const RegionPair& pair, const NoiOptions& options = {});

// Fills observability for every failure whose id has a screenshot pair in
// the bundle; others stay unknown. Never removes a failure.
std::vector<detection::FailureReport> annotate(const snapshot::CaptureBundle& bundle,
                                               std::vector<detection::FailureReport> failures,
                                               const NoiOptions& options = {});

}  // namespace rlf::noi
