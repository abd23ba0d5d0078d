#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "css/stylesheet.hpp"
#include "snapshot/bundle.hpp"

namespace rlf::css {

struct Origin {
  enum class Kind { kInline, kRule };
  Kind kind = Kind::kInline;
  SourceRef source;          // meaningful for kRule only
  std::string sheet_origin;  // stylesheet label, kRule only
  std::string selector;      // winning selector text, kRule only
  std::string media;         // media condition text, if any

  bool operator==(const Origin&) const = default;
};

struct AuthoredValue {
  std::string property;
  std::string raw_value;
  std::optional<double> normalized_px;
  Origin origin;
  Specificity specificity;
  bool important = false;
};

// Author-level cascade over a bundle's stylesheets and inline styles. Only
// developer-written declarations are visible here; user-agent defaults and
// inherited values never produce a result.
class Cascade {
 public:
  explicit Cascade(snapshot::CaptureBundle bundle);

  const snapshot::CaptureBundle& bundle() const { return bundle_; }
  const std::vector<StyleRule>& rules() const { return rules_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Winning authored declaration for `property` on the node at `width`.
  // Throws kUnknownXPath / kUnsampledWidth.
  std::optional<AuthoredValue> resolve(std::string_view xpath,
                                       std::string_view property, int width) const;
  std::optional<AuthoredValue> resolve(std::size_t node, std::string_view property,
                                       int width) const;

  bool matches(const Selector& selector, std::size_t node) const;

  // Highest specificity among the rule's selectors matching the node.
  std::optional<Specificity> match_rule(const StyleRule& rule, std::size_t node) const;

  // Indices into rules() of every rule matching the node, ignoring media.
  const std::vector<std::size_t>& matched_rules(std::size_t node) const {
    return matched_[node];
  }
  const std::vector<Declaration>& inline_declarations(std::size_t node) const {
    return inline_[node];
  }

  // Resolution context for percentages and font-relative units of
  // `property` on the node at `width`.
  LengthContext length_context(std::size_t node, std::string_view property,
                               int width) const;

 private:
  bool match_from(const Selector& selector, std::size_t compound,
                  std::size_t node) const;
  bool match_compound(const CompoundSelector& compound, std::size_t node) const;

  snapshot::CaptureBundle bundle_;
  std::vector<StyleRule> rules_;
  std::vector<std::string> warnings_;
  std::vector<std::vector<Declaration>> inline_;
  std::vector<std::vector<std::size_t>> matched_;
};

// One-shot convenience; builds a Cascade per call.
std::optional<AuthoredValue> resolve_authored(const snapshot::CaptureBundle& bundle,
                                              std::string_view xpath,
                                              std::string_view property, int width);

// Properties whose percentages refer to the containing block height.
bool is_vertical_extent_property(std::string_view property);

}  // namespace rlf::css
