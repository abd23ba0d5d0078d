#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlf::css {

struct Declaration {
  std::string property;  // lowercase longhand
  std::string raw_value;
  bool important = false;

  bool operator==(const Declaration&) const = default;
};

struct Specificity {
  int a = 0;  // ids
  int b = 0;  // classes and attributes
  int c = 0;  // types

  auto operator<=>(const Specificity&) const = default;
};

struct SimpleSelector {
  enum class Kind { kType, kClass, kId, kUniversal, kAttribute };
  Kind kind = Kind::kUniversal;
  std::string value;

  bool operator==(const SimpleSelector&) const = default;
};

using CompoundSelector = std::vector<SimpleSelector>;

enum class Combinator { kDescendant, kChild };

// compounds[i] is joined to compounds[i + 1] by combinators[i]; the subject
// is the last compound.
struct Selector {
  std::vector<CompoundSelector> compounds;
  std::vector<Combinator> combinators;
  std::string text;
};

// Parses one complex selector from the supported subset: type, class, id,
// universal, attribute presence, descendant and child combinators. Returns
// nullopt and fills `error` for anything else.
std::optional<Selector> parse_selector(std::string_view text,
                                       std::string* error = nullptr);

Specificity specificity(const Selector& selector);

struct MediaFeature {
  enum class Kind { kMinWidth, kMaxWidth };
  Kind kind = Kind::kMinWidth;
  double px = 0;
};

// One comma-separated branch of a media query list: all features must hold.
struct MediaQuery {
  bool never = false;  // e.g. `print`
  std::vector<MediaFeature> features;
};

// Satisfied when any query matches.
struct MediaCondition {
  std::vector<MediaQuery> queries;
  std::string text;
};

std::optional<MediaCondition> parse_media_condition(std::string_view text,
                                                    std::string* error = nullptr);
bool media_active(const MediaCondition& condition, double width);

// Combines nested @media blocks.
MediaCondition media_and(const MediaCondition& outer, const MediaCondition& inner);

struct SourceRef {
  int sheet = 0;
  // Ordinal of the style rule within its sheet, counted over every style
  // rule in source order (nested @media rules included, skipped ones too).
  int rule = 0;

  auto operator<=>(const SourceRef&) const = default;
};

struct StyleRule {
  std::vector<Selector> selectors;
  std::vector<Declaration> declarations;
  std::optional<MediaCondition> media;
  SourceRef source;
};

struct ParseResult {
  std::vector<StyleRule> rules;
  std::vector<std::string> warnings;
};

// Error-tolerant: unsupported or malformed constructs are skipped and
// reported in `warnings`.
ParseResult parse_stylesheet(std::string_view text, int sheet_index);

// Parses a declaration block body (without braces), expanding the margin,
// padding and flex-flow shorthands into longhands.
std::vector<Declaration> parse_declarations(std::string_view block,
                                            std::vector<std::string>* warnings = nullptr);

struct LengthContext {
  double element_font_size = 16;
  double root_font_size = 16;
  double parent_extent = 0;
  double viewport_width = 0;
  double viewport_height = 0;
};

// px, em, rem, %, vw and vh to px. Keywords, calc() and unitless non-zero
// numbers give nullopt.
std::optional<double> normalize_length(std::string_view raw_value,
                                       const LengthContext& context);

// True for a single absolute px length such as "120px".
bool is_px_length(std::string_view raw_value);

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace rlf::css
