#pragma once

#include <string>
#include <vector>

#include "localization/localize.hpp"

namespace rlf::prioritization {

using localization::Candidate;

struct RankedEntry {
  int rank = 0;
  Candidate candidate;
};

struct RankedList {
  std::string failure_id;
  std::vector<RankedEntry> entries;
};

struct RankOptions {
  // Places value-bearing candidates ahead of the non-numeric block.
  bool numeric_first = false;
};

// Strict weak order used by rank(): non-numeric block by set rank, numeric
// block by px descending; ties fall to set rank, tier, document order and
// property name, then xpath.
bool rank_before(const Candidate& a, const Candidate& b, const RankOptions& options = {});

// Throws rlf::Error(kEmptyCandidateSet) when nothing was localized.
RankedList rank(std::string failure_id, std::vector<Candidate> candidates,
                const RankOptions& options = {});

// Plain-text table: rank, xpath, property, value, source.
std::string render_report(const RankedList& list);

}  // namespace rlf::prioritization
