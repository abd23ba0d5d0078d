#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snapshot/bundle.hpp"

namespace rlf::detection {

enum class RlfType { kEC, kEP, kVP, kWE, kSR };
enum class Boundary { kLeft, kRight, kTop, kBottom, kNone };
enum class Observability { kUnknown, kObservable, kNoi };

const char* to_string(RlfType type);
const char* to_string(Boundary boundary);
const char* to_string(Observability observability);
std::optional<RlfType> parse_rlf_type(std::string_view text);
std::optional<Boundary> parse_boundary(std::string_view text);
std::optional<Observability> parse_observability(std::string_view text);

struct FailureReport {
  std::string id;
  RlfType type = RlfType::kEP;
  // EP/VP: protruding element then its container (body for VP). EC: the two
  // colliding elements. WE: wrapped element then the row members it left.
  // SR: empty.
  std::vector<std::string> affected;
  int fail_min = 0;
  int fail_max = 0;
  Boundary boundary = Boundary::kNone;
  Observability observability = Observability::kUnknown;
  std::optional<long> differing_pixels;

  bool operator==(const FailureReport&) const = default;
};

struct DetectOptions {
  double eps = 1.0;
  // Widest relation-change window, in px, still classified as small-range.
  int sr_max_span = 50;
  // Minimum vertical overlap, as a fraction of the shorter element, for two
  // siblings to share a row.
  double row_overlap = 0.5;
};

struct Hit {
  int width = 0;
  RlfType type = RlfType::kEP;
  std::vector<std::string> affected;
  Boundary boundary = Boundary::kNone;
};

// Rectangles overlap by more than eps on both axes.
bool intersects(const snapshot::BBox& a, const snapshot::BBox& b, double eps);

// Child lies inside the parent expanded by eps on every side.
bool contains(const snapshot::BBox& parent, const snapshot::BBox& child, double eps);

// Stable id derived from type, range and affected xpaths.
std::string failure_id(RlfType type, int fail_min, int fail_max,
                       const std::vector<std::string>& affected);

// Maximal runs of consecutive sampled widths (spaced by `step`) sharing the
// same (type, affected) become one report. Hits may be in any order.
std::vector<FailureReport> merge_ranges(std::span<const Hit> hits, int step);

std::vector<FailureReport> detect(const snapshot::CaptureBundle& bundle,
                                  const DetectOptions& options = {});

// Nodes that take part in detection: rendered element tags, excluding html,
// body, anything inside <head>, and elements carrying (or nested inside an
// element carrying) a CSS transition or transform at any sampled width.
struct ElementPool {
  std::vector<bool> eligible;
  std::vector<bool> animated;
};
ElementPool build_pool(const snapshot::CaptureBundle& bundle);

// Recorded, visible and with non-zero area at the width.
bool usable(const snapshot::CaptureBundle& bundle, std::size_t width_index,
            std::size_t node);

}  // namespace rlf::detection
