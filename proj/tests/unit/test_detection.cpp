#include <random>

#include "doctest.h"
#include "unit/builders.hpp"

#include "detection/detect.hpp"

using namespace rlf;
using detection::RlfType;
using rlf::test::PageBuilder;

namespace {

detection::FailureReport only(const std::vector<detection::FailureReport>& reports) {
  REQUIRE(reports.size() == 1);
  return reports.front();
}

}  // namespace

TEST_SUITE("detection") {
  TEST_CASE("box predicates respect the tolerance") {
    const snapshot::BBox outer{0, 0, 100, 100};
    CHECK(detection::contains(outer, {0, 0, 101, 100}, 1));
    CHECK_FALSE(detection::contains(outer, {0, 0, 101.5, 100}, 1));
    CHECK(detection::intersects(outer, {98, 0, 10, 10}, 1));
    CHECK_FALSE(detection::intersects(outer, {99, 0, 10, 10}, 1));
  }

  TEST_CASE("failure ids are stable") {
    const std::vector<std::string> affected{"/html[1]/body[1]/div[1]", "/html[1]/body[1]"};
    const auto id = detection::failure_id(RlfType::kVP, 320, 400, affected);
    CHECK(id == detection::failure_id(RlfType::kVP, 320, 400, affected));
    CHECK(id.rfind("vp-320-400-", 0) == 0);
    CHECK(id.size() == std::string("vp-320-400-").size() + 8);
    CHECK(id != detection::failure_id(RlfType::kEP, 320, 400, affected));
    // FNV-1a of the empty input is the offset basis.
    CHECK(detection::failure_id(RlfType::kSR, 1, 2, {}) == "sr-1-2-811c9dc5");
  }

  TEST_CASE("merge_ranges splits at gaps in the sampled widths") {
    std::vector<detection::Hit> hits;
    for (int w : {330, 320, 325, 340, 345}) hits.push_back({w, RlfType::kEP, {"a", "b"}, {}});
    hits.push_back({325, RlfType::kEC, {"a", "c"}, {}});
    const auto r = detection::merge_ranges(hits, 5);
    REQUIRE(r.size() == 3);
    CHECK(r[0].type == RlfType::kEP);
    CHECK(r[0].fail_min == 320);
    CHECK(r[0].fail_max == 330);
    CHECK(r[1].type == RlfType::kEC);
    CHECK(r[2].fail_min == 340);
    CHECK(r[2].fail_max == 345);
  }

  TEST_CASE("element protrusion") {
    PageBuilder p(300, 400, 10);
    const auto box = p.add(PageBuilder::kBody, "div");
    const auto btn = p.add(box, "button");
    p.layout([&](int w, auto& boxes) {
      boxes[box] = {10, 10, w / 2.0, 50};
      boxes[btn] = {10, 10, 170, 20};
    });
    const auto& r = only(detection::detect(p.build()));
    CHECK(r.type == RlfType::kEP);
    CHECK(r.affected == std::vector<std::string>{btn, box});
    CHECK(r.fail_min == 300);
    CHECK(r.fail_max == 330);  // 170 > w/2 + 1 up to w = 330
    CHECK(r.boundary == detection::Boundary::kRight);
  }

  TEST_CASE("a protrusion that persists to the widest width is not reported") {
    PageBuilder p(300, 400, 10);
    const auto box = p.add(PageBuilder::kBody, "div");
    const auto child = p.add(box, "div");
    p.layout([&](int w, auto& boxes) {
      boxes[box] = {0, 0, 100, 50};
      boxes[child] = {0, 0, w > 350 ? 150.0 : 50.0, 20};
    });
    CHECK(detection::detect(p.build()).empty());
  }

  TEST_CASE("viewport protrusion reports only the outermost element") {
    PageBuilder p(300, 400, 10);
    const auto row = p.add(PageBuilder::kBody, "nav");
    const auto item = p.add(row, "a");
    p.layout([&](int, auto& boxes) {
      boxes[row] = {0, 0, 360, 40};
      boxes[item] = {300, 0, 60, 40};
    });
    const auto& r = only(detection::detect(p.build()));
    CHECK(r.type == RlfType::kVP);
    CHECK(r.affected == std::vector<std::string>{row, PageBuilder::kBody});
    CHECK(r.fail_min == 300);
    CHECK(r.fail_max == 350);
  }

  TEST_CASE("collisions are reported at the outermost pair") {
    PageBuilder p(300, 500, 10);
    const auto left = p.add(PageBuilder::kBody, "div");
    const auto right = p.add(PageBuilder::kBody, "div");
    const auto inner = p.add(right, "span");
    p.layout([&](int w, auto& boxes) {
      boxes[left] = {0, 0, 200, 50};
      boxes[right] = {w - 200.0, 0, 200, 50};
      boxes[inner] = {w - 200.0, 0, 100, 50};
    });
    const auto& r = only(detection::detect(p.build()));
    CHECK(r.type == RlfType::kEC);
    CHECK(r.affected == std::vector<std::string>{left, right});
    CHECK(r.fail_min == 300);
    CHECK(r.fail_max == 390);
  }

  TEST_CASE("wrapping needs at least two row members left behind") {
    auto page = [](int items) {
      PageBuilder p(300, 500, 10);
      const auto row = p.add(PageBuilder::kBody, "div");
      std::vector<std::string> kids;
      for (int i = 0; i < items; ++i) kids.push_back(p.add(row, "span"));
      p.layout([=](int w, auto& boxes) {
        boxes[row] = {0, 0, double(w), 100};
        for (int i = 0; i < items; ++i) {
          const bool last_wraps = i == items - 1 && w < 400;
          boxes[kids[i]] = last_wraps ? snapshot::BBox{0, 40, 80, 30}
                                      : snapshot::BBox{i * 100.0, 0, 80, 30};
        }
      });
      return std::make_pair(p.build(), kids);
    };
    const auto [bundle, kids] = page(4);
    const auto& r = only(detection::detect(bundle));
    CHECK(r.type == RlfType::kWE);
    CHECK(r.affected == std::vector<std::string>{kids[3], kids[0], kids[1], kids[2]});
    CHECK(r.fail_min == 300);
    CHECK(r.fail_max == 390);

    // A two-item row that stacks is an ordinary responsive reflow.
    PageBuilder two(300, 500, 10);
    const auto row = two.add(PageBuilder::kBody, "div");
    const auto a = two.add(row, "span");
    const auto b = two.add(row, "span");
    two.layout([&](int w, auto& boxes) {
      boxes[row] = {0, 0, double(w), 100};
      boxes[a] = {0, 0, 80, 30};
      boxes[b] = w < 400 ? snapshot::BBox{0, 40, 80, 30} : snapshot::BBox{100, 0, 80, 30};
    });
    CHECK(detection::detect(two.build()).empty());
  }

  TEST_CASE("a short-lived relation change is a small-range failure") {
    PageBuilder p(600, 800, 5);
    const auto wrap = p.add(PageBuilder::kBody, "div");
    const auto a = p.add(wrap, "div");
    const auto b = p.add(wrap, "div");
    p.layout([&](int w, auto& boxes) {
      boxes[wrap] = {0, 0, double(w), 100};
      boxes[a] = {0, 0, 100, 40};
      const bool odd = w >= 700 && w <= 720;
      boxes[b] = odd ? snapshot::BBox{0, 40, 100, 40} : snapshot::BBox{150, 0, 100, 40};
    });
    const auto& r = only(detection::detect(p.build()));
    CHECK(r.type == RlfType::kSR);
    CHECK(r.affected.empty());
    CHECK(r.fail_min == 700);
    CHECK(r.fail_max == 720);

    detection::DetectOptions narrow;
    narrow.sr_max_span = 20;
    CHECK(detection::detect(p.build(), narrow).empty());
  }

  TEST_CASE("animated elements and their descendants are not examined") {
    PageBuilder p(300, 400, 10);
    const auto track = p.add(PageBuilder::kBody, "div");
    const auto slide = p.add(track, "div");
    p.layout([&](int, auto& boxes) {
      boxes[track] = {0, 0, 900, 100};
      boxes[slide] = {0, 0, 900, 150};
    });
    snapshot::ComputedSubset animated;
    animated.has_transition = true;
    p.computed(track, animated);
    const auto b = p.build();
    const auto pool = detection::build_pool(b);
    CHECK(pool.animated[b.require(slide)]);
    CHECK_FALSE(pool.eligible[b.require(slide)]);
    CHECK_FALSE(pool.eligible[b.require(PageBuilder::kBody)]);
    CHECK(detection::detect(b).empty());
  }

  TEST_CASE("invisible and zero-area elements are skipped") {
    PageBuilder p(300, 310, 10);
    const auto box = p.add(PageBuilder::kBody, "div");
    const auto flat = p.add(box, "div");
    const auto hidden = p.add(box, "div");
    p.layout([&](int, auto& boxes) {
      boxes[box] = {0, 0, 100, 100};
      boxes[flat] = {0, 0, 500, 0};
    });
    const auto b = p.build();
    CHECK_FALSE(detection::usable(b, 0, b.require(flat)));
    CHECK_FALSE(detection::usable(b, 0, b.require(hidden)));
    CHECK(detection::detect(b).empty());
  }

  // Randomized parent/child pages compared against a direct per-width scan
  // of the containment predicate.
  TEST_CASE("protrusion ranges match a per-width recomputation") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> size(60, 260);
    std::uniform_real_distribution<double> slope(0.1, 0.9);
    for (int trial = 0; trial < 40; ++trial) {
      const double child_w = size(rng);
      const double k = slope(rng);
      PageBuilder p(320, 640, 4);
      const auto box = p.add(PageBuilder::kBody, "div");
      const auto child = p.add(box, "div");
      auto layout = [&](int w, std::map<std::string, snapshot::BBox>& boxes) {
        boxes[box] = {0, 0, k * w, 80};
        boxes[child] = {0, 0, child_w, 40};
      };
      p.layout(layout);
      const auto b = p.build();
      std::vector<int> failing;
      for (int w : b.widths()) {
        if (child_w > k * w + 1.0) failing.push_back(w);
      }
      const auto reports = detection::detect(b);
      CAPTURE(child_w);
      CAPTURE(k);
      // A run reaching the widest width is dropped unless it spans everything.
      if (failing.empty() ||
          (failing.back() == b.width_max() && failing.front() != b.width_min())) {
        CHECK(reports.empty());
        continue;
      }
      const auto& r = only(reports);
      CHECK(r.fail_min == failing.front());
      CHECK(r.fail_max == failing.back());
    }
  }

  TEST_CASE("reports are ordered by range start then type") {
    PageBuilder p(300, 400, 10);
    const auto a = p.add(PageBuilder::kBody, "div");
    const auto a_child = p.add(a, "div");
    const auto nav = p.add(PageBuilder::kBody, "nav");
    p.layout([&](int w, auto& boxes) {
      boxes[a] = {0, 0, 100, 50};
      boxes[a_child] = {0, 0, w < 350 ? 150.0 : 50.0, 20};
      boxes[nav] = {0, 60, w < 330 ? 330.0 : 200.0, 20};
    });
    const auto r = detection::detect(p.build());
    REQUIRE(r.size() == 2);
    CHECK(r[0].type == RlfType::kEP);
    CHECK(r[1].type == RlfType::kVP);
    CHECK(r[0].fail_max == 340);
    CHECK(r[1].fail_max == 320);
  }
}
