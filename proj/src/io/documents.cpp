#include "io/documents.hpp"

#include "common/error.hpp"
#include "json.hpp"

namespace rlf::io {

using nlohmann::json;
using detection::FailureReport;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::kSchema, message);
}

json parse(std::string_view text, const char* kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    schema_error(std::string(kind) + ": " + e.what());
  }
  if (!j.is_object()) schema_error(std::string(kind) + ": expected an object");
  auto v = j.find("schema_version");
  if (v == j.end() || !v->is_number_integer() || v->get<int>() != kSchemaVersion) {
    schema_error(std::string(kind) + ": unsupported or missing schema_version");
  }
  auto k = j.find("kind");
  if (k == j.end() || *k != kind) schema_error(std::string(kind) + ": wrong document kind");
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json failure_json(const FailureReport& f) {
  json j{{"id", f.id},
         {"type", detection::to_string(f.type)},
         {"affected", f.affected},
         {"fail_min", f.fail_min},
         {"fail_max", f.fail_max},
         {"boundary", detection::to_string(f.boundary)},
         {"observability", detection::to_string(f.observability)}};
  if (f.differing_pixels) j["differing_pixels"] = *f.differing_pixels;
  return j;
}

template <typename T, typename Parse>
T parse_enum(const json& j, const char* field, Parse parse_fn) {
  auto v = parse_fn(j.at(field).get<std::string>());
  if (!v) schema_error(std::string("invalid ") + field + " '" + j.at(field).dump() + "'");
  return *v;
}

FailureReport failure_from(const json& j) {
  FailureReport f;
  f.id = j.at("id").get<std::string>();
  f.type = parse_enum<detection::RlfType>(j, "type", detection::parse_rlf_type);
  f.affected = j.at("affected").get<std::vector<std::string>>();
  f.fail_min = j.at("fail_min").get<int>();
  f.fail_max = j.at("fail_max").get<int>();
  f.boundary = parse_enum<detection::Boundary>(j, "boundary", detection::parse_boundary);
  f.observability =
      parse_enum<detection::Observability>(j, "observability", detection::parse_observability);
  if (j.contains("differing_pixels")) f.differing_pixels = j["differing_pixels"].get<long>();
  if (f.fail_min > f.fail_max) schema_error("failure " + f.id + ": fail_min > fail_max");
  if (f.type == detection::RlfType::kEC && f.affected.size() != 2) {
    schema_error("failure " + f.id + ": EC needs exactly two affected elements");
  }
  return f;
}

json source_json(const localization::Candidate& c) {
  if (!c.authored) return nullptr;
  const auto& o = c.authored->origin;
  if (o.kind == css::Origin::Kind::kInline) return json{{"kind", "inline"}};
  json j{{"kind", "rule"},
         {"sheet", o.source.sheet},
         {"rule", o.source.rule},
         {"origin", o.sheet_origin},
         {"selector", o.selector}};
  if (!o.media.empty()) j["media"] = o.media;
  return j;
}

json candidate_json(const localization::Candidate& c) {
  json j{{"xpath", c.xpath},
         {"property", c.property},
         {"kind", localization::to_string(c.kind)},
         {"value", c.authored ? json(c.authored->raw_value) : json(nullptr)},
         {"normalized_px", c.normalized_px ? json(*c.normalized_px) : json(nullptr)},
         {"tier", localization::to_string(c.tier)},
         {"set_rank", c.set_rank},
         {"source", source_json(c)}};
  if (c.authored && c.authored->important) j["important"] = true;
  return j;
}

localization::Candidate candidate_from(const json& j, std::size_t order) {
  localization::Candidate c;
  c.xpath = j.at("xpath").get<std::string>();
  c.property = j.at("property").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "authored") {
    c.kind = localization::CandidateKind::kAuthored;
  } else if (kind == "missing") {
    c.kind = localization::CandidateKind::kMissing;
  } else {
    schema_error("invalid candidate kind '" + kind + "'");
  }
  if (!j.at("value").is_null()) {
    css::AuthoredValue v;
    v.property = c.property;
    v.raw_value = j["value"].get<std::string>();
    v.important = j.value("important", false);
    const auto& s = j.at("source");
    if (s.is_object() && s.value("kind", "") == "rule") {
      v.origin.kind = css::Origin::Kind::kRule;
      v.origin.source = {s.at("sheet").get<int>(), s.at("rule").get<int>()};
      v.origin.sheet_origin = s.value("origin", "");
      v.origin.selector = s.value("selector", "");
      v.origin.media = s.value("media", "");
    }
    c.authored = std::move(v);
  }
  if (c.kind == localization::CandidateKind::kAuthored && !c.authored) {
    schema_error("authored candidate without value: " + c.xpath + " " + c.property);
  }
  if (!j.at("normalized_px").is_null()) c.normalized_px = j["normalized_px"].get<double>();
  if (c.authored) c.authored->normalized_px = c.normalized_px;
  const auto tier = j.at("tier").get<std::string>();
  if (tier != "affected" && tier != "neighbor") schema_error("invalid tier '" + tier + "'");
  c.tier = tier == "affected" ? localization::Tier::kAffected : localization::Tier::kNeighbor;
  c.set_rank = j.at("set_rank").get<int>();
  c.doc_order = order;
  return c;
}

json rule_ref_json(const localization::RuleRef& r) {
  return {{"sheet", r.source.sheet},
          {"rule", r.source.rule},
          {"selector", r.selector},
          {"media", r.media},
          {"value", r.raw_value}};
}

json direction_json(const localization::Direction& d) {
  return {{"axis", localization::to_string(d.axis)},
          {"boundary", detection::to_string(d.boundary)}};
}

json scores_json(const metrics::Scores& s) {
  json top = json::object();
  json hits = json::object();
  for (const auto& [n, v] : s.top_fraction) top[std::to_string(n)] = v;
  for (const auto& [n, v] : s.top_hits) hits[std::to_string(n)] = v;
  return {{"rlf_count", s.rlf_count}, {"top_n", top},          {"top_n_hits", hits},
          {"mrr", s.mrr},             {"mrr_excluding_np", s.mrr_excluding_np},
          {"p_at_k", s.p_at_k}};
}

metrics::Scores scores_from(const json& j) {
  metrics::Scores s;
  s.rlf_count = j.at("rlf_count").get<int>();
  for (const auto& [n, v] : j.at("top_n").items()) s.top_fraction[std::stoi(n)] = v.get<double>();
  for (const auto& [n, v] : j.at("top_n_hits").items()) s.top_hits[std::stoi(n)] = v.get<int>();
  s.mrr = j.at("mrr").get<double>();
  s.mrr_excluding_np = j.at("mrr_excluding_np").get<double>();
  s.p_at_k = j.at("p_at_k").get<double>();
  return s;
}

template <typename F>
auto guarded(const char* kind, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    schema_error(std::string(kind) + ": " + e.what());
  }
}

}  // namespace

std::string failures_to_json(const FailuresDocument& doc) {
  json j{{"schema_version", kSchemaVersion}, {"kind", "failures"},
         {"page", doc.page},                 {"width_min", doc.width_min},
         {"width_max", doc.width_max},       {"step", doc.step},
         {"failures", json::array()}};
  for (const auto& f : doc.failures) j["failures"].push_back(failure_json(f));
  return dump(j);
}

FailuresDocument failures_from_json(std::string_view text) {
  const json j = parse(text, "failures");
  return guarded("failures", [&] {
    FailuresDocument doc;
    doc.page = j.at("page").get<std::string>();
    doc.width_min = j.at("width_min").get<int>();
    doc.width_max = j.at("width_max").get<int>();
    doc.step = j.at("step").get<int>();
    for (const auto& f : j.at("failures")) doc.failures.push_back(failure_from(f));
    return doc;
  });
}

std::string candidates_to_json(const pipeline::PageLocalization& page) {
  json j{{"schema_version", kSchemaVersion},
         {"kind", "candidates"},
         {"page", page.page},
         {"failures", json::array()}};
  for (const auto& f : page.failures) {
    json entry{{"failure_id", f.failure.id},
               {"type", detection::to_string(f.failure.type)},
               {"direction", direction_json(f.direction)},
               {"candidates", json::array()}};
    for (const auto& c : f.candidates) entry["candidates"].push_back(candidate_json(c));
    j["failures"].push_back(std::move(entry));
  }
  return dump(j);
}

std::string ranked_to_json(const pipeline::PageLocalization& page) {
  json j{{"schema_version", kSchemaVersion},
         {"kind", "ranked"},
         {"page", page.page},
         {"failures", json::array()}};
  for (const auto& f : page.failures) {
    json entry = failure_json(f.failure);
    entry["failure_id"] = f.failure.id;
    entry.erase("id");
    entry["direction"] = direction_json(f.direction);
    entry["status"] = f.ranked ? "ranked" : "unlocalized";
    entry["entries"] = json::array();
    if (f.ranked) {
      for (const auto& e : f.ranked->entries) {
        json c = candidate_json(e.candidate);
        c["rank"] = e.rank;
        entry["entries"].push_back(std::move(c));
      }
    }
    if (f.failure.type == detection::RlfType::kSR) {
      entry["media_conflicts"] = json::array();
      for (const auto& m : f.conflicts) {
        entry["media_conflicts"].push_back({{"xpath", m.xpath},
                                            {"property", m.property},
                                            {"first", rule_ref_json(m.first)},
                                            {"second", rule_ref_json(m.second)},
                                            {"overlap_min", m.overlap_min},
                                            {"overlap_max", m.overlap_max}});
      }
    }
    j["failures"].push_back(std::move(entry));
  }
  return dump(j);
}

metrics::PageOutcome ranked_from_json(std::string_view text) {
  const json j = parse(text, "ranked");
  return guarded("ranked", [&] {
    metrics::PageOutcome page;
    page.page = j.at("page").get<std::string>();
    for (const auto& fj : j.at("failures")) {
      json copy = fj;
      copy["id"] = fj.at("failure_id");
      metrics::FailureOutcome f;
      f.failure = failure_from(copy);
      const auto status = fj.at("status").get<std::string>();
      if (status == "ranked") {
        prioritization::RankedList list;
        list.failure_id = f.failure.id;
        int expected = 1;
        for (const auto& e : fj.at("entries")) {
          const int rank = e.at("rank").get<int>();
          if (rank != expected++) schema_error("ranks must be contiguous from 1");
          list.entries.push_back({rank, candidate_from(e, list.entries.size())});
        }
        if (list.entries.empty()) schema_error("ranked failure without entries");
        f.ranked = std::move(list);
      } else if (status != "unlocalized") {
        schema_error("invalid status '" + status + "'");
      }
      page.failures.push_back(std::move(f));
    }
    return page;
  });
}

metrics::GroundTruth truth_from_json(std::string_view text) {
  const json j = parse(text, "truth");
  return guarded("truth", [&] {
    metrics::GroundTruth truth;
    for (const auto& [id, e] : j.at("failures").items()) {
      metrics::TruthEntry t;
      for (const auto& p : e.at("acceptable")) {
        t.acceptable.push_back({p.at("xpath").get<std::string>(),
                                p.at("property").get<std::string>()});
      }
      t.np_flag = e.value("np_flag", false);
      t.note = e.value("note", "");
      truth.failures[id] = std::move(t);
    }
    return truth;
  });
}

std::string truth_to_json(const metrics::GroundTruth& truth) {
  json j{{"schema_version", kSchemaVersion}, {"kind", "truth"}, {"failures", json::object()}};
  for (const auto& [id, t] : truth.failures) {
    json pairs = json::array();
    for (const auto& p : t.acceptable) pairs.push_back({{"xpath", p.xpath}, {"property", p.property}});
    j["failures"][id] = {{"acceptable", pairs}, {"np_flag", t.np_flag}, {"note", t.note}};
  }
  return dump(j);
}

std::string metrics_to_json(const metrics::MetricsReport& report) {
  json j{{"schema_version", kSchemaVersion},
         {"kind", "metrics"},
         {"k", report.k},
         {"pages", json::array()},
         {"total", scores_json(report.total)},
         {"p_at_k_average", report.p_at_k_average}};
  for (const auto& p : report.pages) {
    json pj = scores_json(p.scores);
    pj["page"] = p.page;
    j["pages"].push_back(std::move(pj));
  }
  return dump(j);
}

metrics::MetricsReport metrics_from_json(std::string_view text) {
  const json j = parse(text, "metrics");
  return guarded("metrics", [&] {
    metrics::MetricsReport r;
    r.k = j.at("k").get<int>();
    for (const auto& p : j.at("pages")) r.pages.push_back({p.at("page").get<std::string>(), scores_from(p)});
    r.total = scores_from(j.at("total"));
    r.p_at_k_average = j.at("p_at_k_average").get<double>();
    return r;
  });
}

std::string document_kind(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
      return j["kind"].get<std::string>();
    }
  } catch (const json::exception&) {
  }
  return {};
}

}  // namespace rlf::io
