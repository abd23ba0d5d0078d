#include "pipeline/pipeline.hpp"

#include "common/error.hpp"

namespace rlf::pipeline {

PageLocalization localize_page(const css::Cascade& cascade,
                               const std::vector<detection::FailureReport>& failures,
                               const LocalizeOptions& options) {
  PageLocalization page;
  page.page = cascade.bundle().data().url;
  for (const auto& f : failures) {
    FailureLocalization out;
    out.failure = f;
    out.direction = localization::failure_direction(f, cascade.bundle(), options.neighbor.eps);
    if (f.type == detection::RlfType::kSR) {
      out.conflicts = localization::localize_small_range(f, cascade);
      out.candidates = localization::small_range_candidates(f, cascade, out.conflicts);
    } else {
      out.candidates = localization::collect_candidates(f, cascade, options.neighbor);
    }
    try {
      out.ranked = prioritization::rank(f.id, out.candidates, options.rank);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyCandidateSet) throw;
    }
    page.failures.push_back(std::move(out));
  }
  return page;
}

metrics::PageOutcome outcome(const PageLocalization& page) {
  metrics::PageOutcome out;
  out.page = page.page;
  for (const auto& f : page.failures) out.failures.push_back({f.failure, f.ranked});
  return out;
}

}  // namespace rlf::pipeline
