#include "doctest.h"
#include "unit/builders.hpp"

#include "common/error.hpp"
#include "css/cascade.hpp"
#include "detection/detect.hpp"
#include "io/documents.hpp"
#include "json.hpp"
#include "pipeline/pipeline.hpp"

using namespace rlf;
using nlohmann::json;

namespace {

pipeline::PageLocalization localize(const std::string& name) {
  const auto b = snapshot::load_bundle(test::fixture(name));
  const css::Cascade cascade(b);
  return pipeline::localize_page(cascade, detection::detect(b));
}

}  // namespace

TEST_SUITE("documents") {
  TEST_CASE("failure documents round-trip") {
    io::FailuresDocument doc;
    doc.page = "fixture://x";
    doc.width_min = 320;
    doc.width_max = 1400;
    doc.step = 2;
    detection::FailureReport r;
    r.type = detection::RlfType::kEP;
    r.affected = {"/html[1]/body[1]/div[1]/a[1]", "/html[1]/body[1]/div[1]"};
    r.fail_min = 320;
    r.fail_max = 402;
    r.boundary = detection::Boundary::kBottom;
    r.observability = detection::Observability::kNoi;
    r.differing_pixels = 0;
    r.id = detection::failure_id(r.type, r.fail_min, r.fail_max, r.affected);
    doc.failures.push_back(r);
    const auto text = io::failures_to_json(doc);
    const auto back = io::failures_from_json(text);
    CHECK(back.page == doc.page);
    CHECK(back.step == 2);
    REQUIRE(back.failures.size() == 1);
    CHECK(back.failures[0] == r);
    CHECK(io::failures_to_json(back) == text);
    CHECK(io::document_kind(text) == "failures");
    CHECK_THROWS_AS(io::failures_from_json("{\"schema_version\":2,\"kind\":\"failures\"}"),
                    Error);
    CHECK_THROWS_AS(io::failures_from_json("not json"), Error);
  }

  TEST_CASE("ranked documents carry sources and status") {
    const auto page = localize("case_study");
    const auto text = io::ranked_to_json(page);
    const auto j = json::parse(text);
    CHECK(j["kind"] == "ranked");
    CHECK(j["schema_version"] == 1);
    const auto& f = j["failures"][0];
    CHECK(f["status"] == "ranked");
    CHECK(f["direction"]["axis"] == "vertical");
    CHECK(f["direction"]["boundary"] == "bottom");
    const auto& top = f["entries"][0];
    CHECK(top["rank"] == 1);
    CHECK(top["property"] == "height");
    CHECK(top["value"] == "120px");
    CHECK(top["normalized_px"] == 120.0);
    CHECK(top["source"]["kind"] == "rule");
    CHECK(top["source"]["selector"] == ".title");

    const auto outcome = io::ranked_from_json(text);
    CHECK(outcome.page == "fixture://case_study");
    REQUIRE(outcome.failures.size() == 1);
    REQUIRE(outcome.failures[0].ranked);
    CHECK(outcome.failures[0].ranked->entries.size() == f["entries"].size());
    CHECK(outcome.failures[0].ranked->entries[1].candidate.property == "margin-top");
  }

  TEST_CASE("small-range documents list their media conflicts") {
    const auto j = json::parse(io::ranked_to_json(localize("sr")));
    const auto& f = j["failures"][0];
    CHECK(f["type"] == "SR");
    REQUIRE(f["media_conflicts"].size() == 1);
    CHECK(f["media_conflicts"][0]["property"] == "margin-left");
    CHECK(f["entries"][0]["source"]["media"] == "(min-width: 780px)");
  }

  TEST_CASE("unlocalized failures keep their place") {
    // A heading with no authored box properties yields no candidates.
    const auto b = snapshot::load_bundle(test::fixture("clean"));
    detection::FailureReport r;
    r.type = detection::RlfType::kVP;
    r.affected = {"/html[1]/body[1]/header[1]/h1[1]", "/html[1]/body[1]"};
    r.fail_min = 320;
    r.fail_max = 320;
    r.id = detection::failure_id(r.type, 320, 320, r.affected);
    const auto page = pipeline::localize_page(css::Cascade(b), {r});
    REQUIRE(page.failures.size() == 1);
    const auto j = json::parse(io::ranked_to_json(page));
    CHECK(j["failures"][0]["status"] == "unlocalized");
    CHECK(j["failures"][0]["entries"].empty());
    const auto out = pipeline::outcome(page);
    CHECK_FALSE(out.failures[0].ranked);
  }

  TEST_CASE("candidate documents") {
    const auto j = json::parse(io::candidates_to_json(localize("we")));
    CHECK(j["kind"] == "candidates");
    bool missing = false;
    for (const auto& c : j["failures"][0]["candidates"]) missing |= c["kind"] == "missing";
    CHECK(missing);
  }

  TEST_CASE("truth and metrics documents round-trip") {
    metrics::GroundTruth t;
    t.failures["p#ep-1"] = {{{"/a", "height"}, {"/b", "margin-top"}}, true, "note"};
    const auto text = io::truth_to_json(t);
    const auto back = io::truth_from_json(text);
    REQUIRE(back.failures.count("p#ep-1"));
    CHECK(back.failures.at("p#ep-1").acceptable.size() == 2);
    CHECK(back.failures.at("p#ep-1").np_flag);
    CHECK(io::truth_to_json(back) == text);

    metrics::MetricsReport m;
    m.k = 3;
    m.total.rlf_count = 4;
    m.total.top_hits = {{1, 2}, {3, 3}, {5, 3}, {7, 4}};
    m.total.top_fraction = {{1, 0.5}, {3, 0.75}, {5, 0.75}, {7, 1.0}};
    m.total.mrr = 0.625;
    m.pages.push_back({"p", m.total});
    m.p_at_k_average = 0.25;
    const auto mt = io::metrics_to_json(m);
    CHECK(io::document_kind(mt) == "metrics");
    CHECK(io::metrics_to_json(io::metrics_from_json(mt)) == mt);
  }

  TEST_CASE("stage output is byte-identical across runs") {
    for (const char* name : {"case_study", "ec", "vp", "we", "sr"}) {
      CAPTURE(name);
      CHECK(io::ranked_to_json(localize(name)) == io::ranked_to_json(localize(name)));
    }
  }
}
