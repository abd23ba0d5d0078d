#pragma once

// JSON documents exchanged between pipeline stages. Every document carries
// "schema_version": 1 and is written with sorted keys, so equal inputs give
// byte-identical files.

#include <string>
#include <string_view>
#include <vector>

#include "detection/detect.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/pipeline.hpp"

namespace rlf::io {

struct FailuresDocument {
  std::string page;
  int width_min = 0;
  int width_max = 0;
  int step = 1;
  std::vector<detection::FailureReport> failures;
};

std::string failures_to_json(const FailuresDocument& doc);
FailuresDocument failures_from_json(std::string_view text);

// Set E per failure, before ranking.
std::string candidates_to_json(const pipeline::PageLocalization& page);

// Ranked lists per failure; unlocalized failures have status "unlocalized"
// and no entries.
std::string ranked_to_json(const pipeline::PageLocalization& page);
metrics::PageOutcome ranked_from_json(std::string_view text);

metrics::GroundTruth truth_from_json(std::string_view text);
std::string truth_to_json(const metrics::GroundTruth& truth);

std::string metrics_to_json(const metrics::MetricsReport& report);
metrics::MetricsReport metrics_from_json(std::string_view text);

// "ranked", "metrics", "failures" or "" from the document's "kind" field.
std::string document_kind(std::string_view text);

}  // namespace rlf::io
