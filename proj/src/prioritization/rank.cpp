#include "prioritization/rank.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "common/error.hpp"

namespace rlf::prioritization {

bool rank_before(const Candidate& a, const Candidate& b, const RankOptions& options) {
  const bool a_num = a.normalized_px.has_value();
  const bool b_num = b.normalized_px.has_value();
  if (a_num != b_num) return options.numeric_first ? a_num : b_num;
  if (a_num && *a.normalized_px != *b.normalized_px) {
    return *a.normalized_px > *b.normalized_px;
  }
  return std::tie(a.set_rank, a.tier, a.doc_order, a.property, a.xpath) <
         std::tie(b.set_rank, b.tier, b.doc_order, b.property, b.xpath);
}

RankedList rank(std::string failure_id, std::vector<Candidate> candidates,
                const RankOptions& options) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidateSet, "no candidates for failure " + failure_id);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& a, const Candidate& b) { return rank_before(a, b, options); });
  RankedList out;
  out.failure_id = std::move(failure_id);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.entries.push_back({static_cast<int>(i + 1), std::move(candidates[i])});
  }
  return out;
}

namespace {

std::string value_text(const Candidate& c) {
  if (c.kind == localization::CandidateKind::kMissing) return "(missing)";
  return c.authored ? c.authored->raw_value : std::string();
}

std::string source_text(const Candidate& c) {
  if (!c.authored) return "-";
  const auto& o = c.authored->origin;
  if (o.kind == css::Origin::Kind::kInline) return "inline style";
  std::string s = o.sheet_origin + " rule " + std::to_string(o.source.rule) + " \"" +
                  o.selector + "\"";
  if (!o.media.empty()) s += " @media " + o.media;
  return s;
}

}  // namespace

std::string render_report(const RankedList& list) {
  std::ostringstream out;
  out << "failure " << list.failure_id << "\n";
  if (list.entries.empty()) {
    out << "  no candidates\n";
    return out.str();
  }
  std::size_t xw = 5;
  std::size_t pw = 8;
  std::size_t vw = 5;
  for (const auto& e : list.entries) {
    xw = std::max(xw, e.candidate.xpath.size());
    pw = std::max(pw, e.candidate.property.size());
    vw = std::max(vw, value_text(e.candidate).size());
  }
  auto row = [&](const std::string& r, const std::string& x, const std::string& p,
                 const std::string& v, const std::string& s) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%4s", r.c_str());
    out << "  " << buf << "  " << x << std::string(xw - x.size() + 2, ' ') << p
        << std::string(pw - p.size() + 2, ' ') << v << std::string(vw - v.size() + 2, ' ') << s
        << "\n";
  };
  row("rank", "xpath", "property", "value", "source");
  for (const auto& e : list.entries) {
    row(std::to_string(e.rank), e.candidate.xpath, e.candidate.property,
        value_text(e.candidate), source_text(e.candidate));
  }
  return out.str();
}

}  // namespace rlf::prioritization
