#include "doctest.h"
#include "unit/builders.hpp"

#include "common/error.hpp"
#include "common/text_file.hpp"
#include "snapshot/bundle.hpp"

using namespace rlf;
using rlf::test::PageBuilder;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no rlf::Error raised");
  return ErrorCode::kInvalidArgument;
}

PageBuilder two_boxes() {
  PageBuilder p(320, 330, 5);
  const auto a = p.add(PageBuilder::kBody, "div", {"a"});
  p.add(a, "span");
  p.add(PageBuilder::kBody, "div", {"b"});
  p.css(".a { width: 50% }");
  p.layout([](int w, auto& boxes) {
    boxes["/html[1]/body[1]/div[1]"] = {0, 0, w / 2.0, 40};
    boxes["/html[1]/body[1]/div[1]/span[1]"] = {0, 0, 20, 10};
    boxes["/html[1]/body[1]/div[2]"] = {0, 40, double(w), 40};
  });
  return p;
}

}  // namespace

TEST_SUITE("bundle") {
  TEST_CASE("save then load round-trips the data") {
    test::TempDir dir("bundle-roundtrip");
    auto data = two_boxes().data();
    data.warnings = {"stylesheet skipped"};
    data.screenshots["ep-1-2-00000000"] = {"images/a.png", "images/b.png", {1, 2, 3, 4}};
    snapshot::save_bundle(data, dir.path());
    const auto loaded = snapshot::load_bundle(dir.path());
    CHECK(loaded.data() == data);
    CHECK(loaded.root_dir() == dir.path());
  }

  TEST_CASE("indexes nodes and widths") {
    const auto b = two_boxes().build();
    CHECK(b.widths().size() == 3);
    CHECK(b.node_count() == 6);
    REQUIRE(b.body());
    CHECK(b.node(*b.body()).tag() == "body");
    const auto span = b.require("/html[1]/body[1]/div[1]/span[1]");
    CHECK(b.is_ancestor(*b.body(), span));
    CHECK_FALSE(b.is_ancestor(span, *b.body()));
    CHECK(b.element_box("/html[1]/body[1]/div[1]", 330) == snapshot::BBox{0, 0, 165, 40});
    CHECK_FALSE(b.width_index(321));
  }

  TEST_CASE("tree neighbours") {
    const auto b = two_boxes().build();
    const auto n = b.tree_neighbors("/html[1]/body[1]/div[1]");
    CHECK(n.parent == "/html[1]/body[1]");
    CHECK(n.siblings == std::vector<std::string>{"/html[1]/body[1]/div[2]"});
    CHECK(n.children == std::vector<std::string>{"/html[1]/body[1]/div[1]/span[1]"});
  }

  TEST_CASE("restricted keeps the sampled widths inside the range") {
    const auto b = two_boxes().build().restricted(322, 400);
    CHECK(b.width_min() == 325);
    CHECK(b.width_max() == 330);
    CHECK(b.widths().size() == 2);
  }

  TEST_CASE("lookup errors") {
    const auto b = two_boxes().build();
    CHECK(code_of([&] { b.require("/html[1]/nav[1]"); }) == ErrorCode::kUnknownXPath);
    CHECK(code_of([&] { b.element_box("/html[1]/body[1]", 321); }) ==
          ErrorCode::kUnsampledWidth);
  }

  TEST_CASE("a sampled width without a record is rejected") {
    auto data = two_boxes().data();
    data.records.erase(data.records.begin() + 1);
    CHECK(code_of([&] { snapshot::CaptureBundle::from_data(data); }) ==
          ErrorCode::kMissingViewport);
  }

  TEST_CASE("duplicate xpaths are rejected") {
    auto data = two_boxes().data();
    data.dom.children[1].children[1].xpath = "/html[1]/body[1]/div[1]";
    CHECK(code_of([&] { snapshot::CaptureBundle::from_data(data); }) ==
          ErrorCode::kDuplicateXPath);
  }

  TEST_CASE("schema violations") {
    test::TempDir dir("bundle-schema");
    snapshot::save_bundle(two_boxes().data(), dir.path());
    auto manifest = read_text_file(dir.path() / "manifest.json");
    const auto pos = manifest.find("\"schema_version\": 1");
    REQUIRE(pos != std::string::npos);
    manifest.replace(pos, 19, "\"schema_version\": 7");
    write_text_file(dir.path() / "manifest.json", manifest);
    CHECK(code_of([&] { snapshot::load_bundle(dir.path()); }) == ErrorCode::kSchema);

    CHECK(code_of([&] {
            snapshot::parse_bundle_documents("{\"schema_version\":1}", "{}", "{}", "");
          }) == ErrorCode::kSchema);
    CHECK(code_of([&] { snapshot::load_bundle(dir.path() / "absent"); }) == ErrorCode::kIo);
  }

  TEST_CASE("geometry is stored with two decimals") {
    test::TempDir dir("bundle-round");
    PageBuilder p(400, 400);
    p.add(PageBuilder::kBody, "p");
    p.layout([](int, auto& boxes) { boxes["/html[1]/body[1]/p[1]"] = {1.0 / 3, 2.005, 10, 10}; });
    snapshot::save_bundle(p.data(), dir.path());
    const auto b = snapshot::load_bundle(dir.path());
    const auto box = b.element_box("/html[1]/body[1]/p[1]", 400);
    CHECK(box.x == doctest::Approx(0.33));
    CHECK(box.y == doctest::Approx(2.0).epsilon(0.006));
  }

  TEST_CASE("committed fixtures load") {
    for (const char* name : {"ep_button", "case_study", "clean", "vp", "ec", "we", "sr",
                             "carousel", "typography", "noi_transparent", "noi_opaque"}) {
      CAPTURE(name);
      const auto b = snapshot::load_bundle(test::fixture(name));
      CHECK(b.widths().size() ==
            static_cast<std::size_t>((b.width_max() - b.width_min()) / b.step() + 1));
    }
  }
}
