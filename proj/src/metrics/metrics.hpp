#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "detection/detect.hpp"
#include "prioritization/rank.hpp"

namespace rlf::metrics {

struct PairRef {
  std::string xpath;
  std::string property;

  auto operator<=>(const PairRef&) const = default;
};

struct TruthEntry {
  std::vector<PairRef> acceptable;
  bool np_flag = false;
  std::string note;
};

// Keyed by failure id, or "<page>#<failure id>" where ids repeat across pages.
struct GroundTruth {
  std::map<std::string, TruthEntry> failures;

  const TruthEntry* find(const std::string& page, const std::string& failure_id) const;
};

// Fraction of failures whose first acceptable pair sits at rank <= n.
// Failures without one count in the denominator.
double top_n(std::span<const std::optional<int>> first_correct_ranks, int n);

// Mean reciprocal rank; a failure never localized contributes 0.
double mrr(std::span<const std::optional<int>> first_correct_ranks);

double p_at_k(int relevant_in_top_k, int k);
double mean(std::span<const double> values);

std::optional<int> first_correct_rank(const prioritization::RankedList& list,
                                      const TruthEntry& truth);
int relevant_in_top(const prioritization::RankedList& list, const TruthEntry& truth, int k);

// One localized (or unlocalizable) failure of a page.
struct FailureOutcome {
  detection::FailureReport failure;
  std::optional<prioritization::RankedList> ranked;
};

struct PageOutcome {
  std::string page;
  std::vector<FailureOutcome> failures;
};

struct EvaluateOptions {
  bool exclude_np = false;
  bool exclude_we_np = false;
  int k = 3;
};

inline constexpr int kTopN[] = {1, 3, 5, 7};

struct Scores {
  int rlf_count = 0;
  std::map<int, int> top_hits;        // n -> failures hit within top n
  std::map<int, double> top_fraction;  // n -> top_hits / rlf_count
  double mrr = 0;
  double mrr_excluding_np = 0;
  double p_at_k = 0;  // mean of per-failure P@K
};

struct PageScores {
  std::string page;
  Scores scores;
};

struct MetricsReport {
  int k = 3;
  std::vector<PageScores> pages;
  Scores total;
  // Mean of the per-page P@K values.
  double p_at_k_average = 0;
};

// Throws kSchema when a failure has no truth entry.
MetricsReport evaluate(std::span<const PageOutcome> pages, const GroundTruth& truth,
                       const EvaluateOptions& options = {});

std::string render_metrics(const MetricsReport& report);

}  // namespace rlf::metrics
