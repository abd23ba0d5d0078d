#pragma once

#include <optional>
#include <string>
#include <vector>

#include "css/cascade.hpp"
#include "detection/detect.hpp"
#include "localization/localize.hpp"
#include "metrics/metrics.hpp"
#include "prioritization/rank.hpp"

namespace rlf::pipeline {

struct LocalizeOptions {
  localization::NeighborOptions neighbor;
  prioritization::RankOptions rank;
};

struct FailureLocalization {
  detection::FailureReport failure;
  localization::Direction direction;
  std::vector<localization::Candidate> candidates;
  std::vector<localization::MediaConflict> conflicts;  // SR only
  // Absent when the candidate set is empty.
  std::optional<prioritization::RankedList> ranked;
};

struct PageLocalization {
  std::string page;
  std::vector<FailureLocalization> failures;
};

PageLocalization localize_page(const css::Cascade& cascade,
                               const std::vector<detection::FailureReport>& failures,
                               const LocalizeOptions& options = {});

metrics::PageOutcome outcome(const PageLocalization& page);

}  // namespace rlf::pipeline
