#include "metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "common/error.hpp"

namespace rlf::metrics {

const TruthEntry* GroundTruth::find(const std::string& page,
                                    const std::string& failure_id) const {
  auto it = failures.find(page + "#" + failure_id);
  if (it == failures.end()) it = failures.find(failure_id);
  return it == failures.end() ? nullptr : &it->second;
}

double top_n(std::span<const std::optional<int>> first_correct_ranks, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (first_correct_ranks.empty()) return 0;
  const auto hits = std::count_if(first_correct_ranks.begin(), first_correct_ranks.end(),
                                  [n](const std::optional<int>& r) { return r && *r <= n; });
  return static_cast<double>(hits) / static_cast<double>(first_correct_ranks.size());
}

double mrr(std::span<const std::optional<int>> first_correct_ranks) {
  if (first_correct_ranks.empty()) return 0;
  double sum = 0;
  for (const auto& r : first_correct_ranks) {
    if (!r) continue;
    if (*r < 1) throw Error(ErrorCode::kInvalidArgument, "ranks start at 1");
    sum += 1.0 / *r;
  }
  return sum / static_cast<double>(first_correct_ranks.size());
}

double p_at_k(int relevant_in_top_k, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  return static_cast<double>(relevant_in_top_k) / k;
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

namespace {

bool acceptable(const TruthEntry& truth, const localization::Candidate& c) {
  return std::find(truth.acceptable.begin(), truth.acceptable.end(),
                   PairRef{c.xpath, c.property}) != truth.acceptable.end();
}

struct Row {
  std::optional<int> first;
  int relevant = 0;
  bool np = false;
};

Scores score(const std::vector<Row>& rows, int k) {
  Scores s;
  s.rlf_count = static_cast<int>(rows.size());
  std::vector<std::optional<int>> ranks;
  std::vector<std::optional<int>> ranks_no_np;
  std::vector<double> precision;
  for (const auto& r : rows) {
    ranks.push_back(r.first);
    if (!r.np) ranks_no_np.push_back(r.first);
    precision.push_back(p_at_k(r.relevant, k));
  }
  for (int n : kTopN) {
    s.top_hits[n] = static_cast<int>(std::count_if(
        ranks.begin(), ranks.end(), [n](const auto& r) { return r && *r <= n; }));
    s.top_fraction[n] = top_n(ranks, n);
  }
  s.mrr = mrr(ranks);
  s.mrr_excluding_np = mrr(ranks_no_np);
  s.p_at_k = mean(precision);
  return s;
}

}  // namespace

std::optional<int> first_correct_rank(const prioritization::RankedList& list,
                                      const TruthEntry& truth) {
  for (const auto& e : list.entries) {
    if (acceptable(truth, e.candidate)) return e.rank;
  }
  return std::nullopt;
}

int relevant_in_top(const prioritization::RankedList& list, const TruthEntry& truth, int k) {
  int n = 0;
  for (const auto& e : list.entries) {
    if (e.rank <= k && acceptable(truth, e.candidate)) ++n;
  }
  return n;
}

MetricsReport evaluate(std::span<const PageOutcome> pages, const GroundTruth& truth,
                       const EvaluateOptions& options) {
  if (options.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  MetricsReport report;
  report.k = options.k;
  std::vector<Row> all;
  std::vector<double> page_precision;
  for (const auto& page : pages) {
    std::vector<Row> rows;
    for (const auto& f : page.failures) {
      const TruthEntry* t = truth.find(page.page, f.failure.id);
      if (!t) {
        throw Error(ErrorCode::kSchema,
                    "no ground truth for failure " + f.failure.id + " of " + page.page);
      }
      if (t->np_flag && options.exclude_np) continue;
      if (t->np_flag && options.exclude_we_np && f.failure.type == detection::RlfType::kWE) {
        continue;
      }
      Row r;
      r.np = t->np_flag;
      if (f.ranked) {
        r.first = first_correct_rank(*f.ranked, *t);
        r.relevant = relevant_in_top(*f.ranked, *t, options.k);
      }
      rows.push_back(r);
    }
    all.insert(all.end(), rows.begin(), rows.end());
    report.pages.push_back({page.page, score(rows, options.k)});
    if (!rows.empty()) page_precision.push_back(report.pages.back().scores.p_at_k);
  }
  report.total = score(all, options.k);
  report.p_at_k_average = mean(page_precision);
  return report;
}

std::string render_metrics(const MetricsReport& report) {
  std::ostringstream out;
  char buf[256];
  std::size_t pw = 5;
  for (const auto& p : report.pages) pw = std::max(pw, p.page.size());
  std::snprintf(buf, sizeof buf, "%-*s  %5s  %-13s %-13s %-13s %-13s %7s %9s %7s\n",
                static_cast<int>(pw), "page", "RLFs", "Top-1", "Top-3", "Top-5", "Top-7",
                "MRR", "MRR-NP", "P@K");
  out << buf;
  auto line = [&](const std::string& name, const Scores& s) {
    std::string cells[4];
    for (int i = 0; i < 4; ++i) {
      const int n = kTopN[i];
      char cell[32];
      std::snprintf(cell, sizeof cell, "%d (%.2f%%)", s.top_hits.at(n),
                    100.0 * s.top_fraction.at(n));
      cells[i] = cell;
    }
    std::snprintf(buf, sizeof buf, "%-*s  %5d  %-13s %-13s %-13s %-13s %6.2f%% %8.2f%% %6.2f%%\n",
                  static_cast<int>(pw), name.c_str(), s.rlf_count, cells[0].c_str(),
                  cells[1].c_str(), cells[2].c_str(), cells[3].c_str(), 100.0 * s.mrr,
                  100.0 * s.mrr_excluding_np, 100.0 * s.p_at_k);
    out << buf;
  };
  for (const auto& p : report.pages) line(p.page, p.scores);
  line("total", report.total);
  std::snprintf(buf, sizeof buf, "P@%d averaged over pages: %.2f%%\n", report.k,
                100.0 * report.p_at_k_average);
  out << buf;
  return out.str();
}

}  // namespace rlf::metrics
