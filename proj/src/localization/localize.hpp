#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "css/cascade.hpp"
#include "detection/detect.hpp"
#include "snapshot/bundle.hpp"

namespace rlf::localization {

using detection::Boundary;
using detection::FailureReport;
using detection::RlfType;

enum class Axis { kHorizontal, kVertical, kBoth, kNone };
const char* to_string(Axis axis);

struct Direction {
  Axis axis = Axis::kNone;
  Boundary boundary = Boundary::kNone;

  bool operator==(const Direction&) const = default;
};

// Geometry of the failure at fail_min. EP/VP take the violated edge of the
// container (or viewport); EC takes the axis of the shallower overlap; WE is
// treated as both axes; SR has no geometry.
Direction failure_direction(const FailureReport& report,
                            const snapshot::CaptureBundle& bundle, double eps = 1.0);

enum class MatcherKind {
  kPositionAbsolute,
  kFloat,
  kFixedDimension,  // authored height/width in px
  kDisplay,
  kMarginPadding,
  kFontSize,
  kWhiteSpace,
  kNegativeMargin,
  kMissingFlexWrap,  // display:flex without flex-wrap:wrap
  kMaxDimension,
  kMissingFlex,  // parent is not a flex container
  kParentWidth,
};

struct SetEntry {
  MatcherKind matcher;
  int rank = 0;
  std::string label;
};

struct PropertySet {
  RlfType type = RlfType::kEP;
  std::vector<SetEntry> entries;
};

// The ranked search set for EP, EC, VP or WE. Throws kInvalidArgument for SR.
const PropertySet& property_set(RlfType type);

// Matchers that test structure rather than a single authored longhand.
bool is_predicate(MatcherKind matcher);

bool axis_relevant(std::string_view property, const Direction& dir);

enum class Role { kElement, kContainer };

struct NeighborElement {
  std::size_t node = 0;
  Role role = Role::kElement;
};

struct NeighborOptions {
  // Structural radius: siblings of the affected elements and of their
  // ancestors up to hops - 1 levels; ancestors up to `hops` levels take the
  // container role.
  int hops = 1;
  double eps = 1.0;
};

// Elements searched for a failure, in document order. Containers only take
// predicate matchers (and the WE parent width entry).
std::vector<NeighborElement> neighbor_elements(const FailureReport& report,
                                               const snapshot::CaptureBundle& bundle,
                                               const Direction& dir,
                                               const NeighborOptions& options = {});

std::vector<std::string> neighbor_search(const FailureReport& report,
                                         const snapshot::CaptureBundle& bundle,
                                         const Direction& dir,
                                         const NeighborOptions& options = {});

enum class CandidateKind { kAuthored, kMissing };
enum class Tier { kAffected, kNeighbor };
const char* to_string(CandidateKind kind);
const char* to_string(Tier tier);

struct Candidate {
  std::string xpath;
  std::string property;
  CandidateKind kind = CandidateKind::kAuthored;
  std::optional<css::AuthoredValue> authored;
  // Present for value-bearing entries; predicate matches carry none.
  std::optional<double> normalized_px;
  Tier tier = Tier::kNeighbor;
  int set_rank = 0;
  std::size_t doc_order = 0;
};

std::vector<Candidate> collect_candidates(const FailureReport& report,
                                          const css::Cascade& cascade,
                                          const NeighborOptions& options = {});

struct RuleRef {
  css::SourceRef source;
  std::string selector;
  std::string media;
  std::string raw_value;

  bool operator==(const RuleRef&) const = default;
};

struct MediaConflict {
  std::string xpath;
  std::string property;
  RuleRef first;
  RuleRef second;
  int overlap_min = 0;
  int overlap_max = 0;
};

// Pairs of media-conditioned rules that both apply to one element
// throughout [fail_min, fail_max] and set the same property. The overlap is
// the maximal run of sampled widths, containing the failure, where both are
// active.
std::vector<MediaConflict> localize_small_range(const FailureReport& report,
                                                const css::Cascade& cascade);

// SR failures localize to their conflicting declarations: one candidate per
// distinct (element, property), carrying the value in force at fail_min.
std::vector<Candidate> small_range_candidates(const FailureReport& report,
                                              const css::Cascade& cascade,
                                              const std::vector<MediaConflict>& conflicts);

}  // namespace rlf::localization
