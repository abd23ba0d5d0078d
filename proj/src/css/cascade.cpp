#include "css/cascade.hpp"

#include <algorithm>
#include <tuple>

namespace rlf::css {

bool is_vertical_extent_property(std::string_view property) {
  return property == "height" || property == "min-height" ||
         property == "max-height" || property == "top" || property == "bottom";
}

Cascade::Cascade(snapshot::CaptureBundle bundle) : bundle_(std::move(bundle)) {
  const auto& sheets = bundle_.data().stylesheets;
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    if (sheets[i].opaque) {
      warnings_.push_back("sheet " + std::to_string(i) + " (" + sheets[i].origin +
                          ") is opaque; its declarations are not authored-visible");
      continue;
    }
    ParseResult parsed = parse_stylesheet(sheets[i].text, static_cast<int>(i));
    for (auto& r : parsed.rules) rules_.push_back(std::move(r));
    for (auto& w : parsed.warnings) warnings_.push_back(std::move(w));
  }

  const std::size_t n = bundle_.node_count();
  inline_.resize(n);
  matched_.resize(n);
  for (std::size_t node = 0; node < n; ++node) {
    const auto& style = bundle_.node(node).dom->inline_style;
    if (!style.empty()) inline_[node] = parse_declarations(style, &warnings_);
    for (std::size_t r = 0; r < rules_.size(); ++r) {
      if (match_rule(rules_[r], node)) matched_[node].push_back(r);
    }
  }
}

bool Cascade::match_compound(const CompoundSelector& compound, std::size_t node) const {
  const snapshot::DomNode& dom = *bundle_.node(node).dom;
  for (const auto& simple : compound) {
    switch (simple.kind) {
      case SimpleSelector::Kind::kUniversal:
        break;
      case SimpleSelector::Kind::kType:
        if (dom.tag != simple.value) return false;
        break;
      case SimpleSelector::Kind::kId:
        if (!dom.id || *dom.id != simple.value) return false;
        break;
      case SimpleSelector::Kind::kClass:
        if (std::find(dom.classes.begin(), dom.classes.end(), simple.value) ==
            dom.classes.end()) {
          return false;
        }
        break;
      case SimpleSelector::Kind::kAttribute: {
        const bool present =
            dom.attributes.count(simple.value) > 0 ||
            (simple.value == "id" && dom.id.has_value()) ||
            (simple.value == "class" && !dom.classes.empty()) ||
            (simple.value == "style" && !dom.inline_style.empty());
        if (!present) return false;
        break;
      }
    }
  }
  return true;
}

bool Cascade::match_from(const Selector& selector, std::size_t compound,
                         std::size_t node) const {
  if (!match_compound(selector.compounds[compound], node)) return false;
  if (compound == 0) return true;
  const Combinator comb = selector.combinators[compound - 1];
  int parent = bundle_.node(node).parent;
  if (comb == Combinator::kChild) {
    return parent >= 0 &&
           match_from(selector, compound - 1, static_cast<std::size_t>(parent));
  }
  while (parent >= 0) {
    if (match_from(selector, compound - 1, static_cast<std::size_t>(parent))) {
      return true;
    }
    parent = bundle_.node(static_cast<std::size_t>(parent)).parent;
  }
  return false;
}

bool Cascade::matches(const Selector& selector, std::size_t node) const {
  if (selector.compounds.empty()) return false;
  return match_from(selector, selector.compounds.size() - 1, node);
}

std::optional<Specificity> Cascade::match_rule(const StyleRule& rule,
                                               std::size_t node) const {
  std::optional<Specificity> best;
  for (const auto& sel : rule.selectors) {
    if (matches(sel, node)) {
      const Specificity s = specificity(sel);
      if (!best || s > *best) best = s;
    }
  }
  return best;
}

LengthContext Cascade::length_context(std::size_t node, std::string_view property,
                                      int width) const {
  const std::size_t wi = bundle_.require_width(width);
  LengthContext ctx;
  ctx.viewport_width = width;
  ctx.viewport_height = bundle_.height();
  if (const auto* root = bundle_.entry(wi, bundle_.root())) {
    ctx.root_font_size = root->computed.font_size;
  }
  const int parent = bundle_.node(node).parent;
  const snapshot::Entry* parent_entry =
      parent >= 0 ? bundle_.entry(wi, static_cast<std::size_t>(parent)) : nullptr;
  const snapshot::Entry* own = bundle_.entry(wi, node);
  if (property == "font-size") {
    ctx.element_font_size =
        parent_entry ? parent_entry->computed.font_size : ctx.root_font_size;
    ctx.parent_extent = ctx.element_font_size;
  } else {
    ctx.element_font_size = own ? own->computed.font_size : ctx.root_font_size;
    if (parent_entry) {
      ctx.parent_extent = is_vertical_extent_property(property)
                              ? parent_entry->bbox.h
                              : parent_entry->bbox.w;
    }
  }
  return ctx;
}

std::optional<AuthoredValue> Cascade::resolve(std::string_view xpath,
                                              std::string_view property,
                                              int width) const {
  return resolve(bundle_.require(xpath), property, width);
}

std::optional<AuthoredValue> Cascade::resolve(std::size_t node,
                                              std::string_view property,
                                              int width) const {
  bundle_.require_width(width);
  // Precedence key: important, inline, specificity, source order, position.
  using Key = std::tuple<bool, bool, Specificity, SourceRef, std::size_t>;
  std::optional<Key> best_key;
  std::optional<AuthoredValue> best;

  const auto& inl = inline_[node];
  for (std::size_t i = 0; i < inl.size(); ++i) {
    if (inl[i].property != property) continue;
    Key key{inl[i].important, true, Specificity{}, SourceRef{}, i};
    if (!best_key || key > *best_key) {
      best_key = key;
      best = AuthoredValue{inl[i].property, inl[i].raw_value, std::nullopt,
                           Origin{}, Specificity{}, inl[i].important};
    }
  }
  for (std::size_t r : matched_[node]) {
    const StyleRule& rule = rules_[r];
    if (rule.media && !media_active(*rule.media, width)) continue;
    const Specificity spec = *match_rule(rule, node);
    for (std::size_t i = 0; i < rule.declarations.size(); ++i) {
      const Declaration& d = rule.declarations[i];
      if (d.property != property) continue;
      Key key{d.important, false, spec, rule.source, i};
      if (!best_key || key > *best_key) {
        best_key = key;
        Origin origin;
        origin.kind = Origin::Kind::kRule;
        origin.source = rule.source;
        origin.sheet_origin =
            bundle_.data().stylesheets[static_cast<std::size_t>(rule.source.sheet)].origin;
        for (const auto& sel : rule.selectors) {
          if (matches(sel, node) && specificity(sel) == spec) {
            origin.selector = sel.text;
            break;
          }
        }
        if (rule.media) origin.media = rule.media->text;
        best = AuthoredValue{d.property, d.raw_value, std::nullopt, std::move(origin),
                             spec, d.important};
      }
    }
  }
  if (best) {
    best->normalized_px =
        normalize_length(best->raw_value, length_context(node, property, width));
  }
  return best;
}

std::optional<AuthoredValue> resolve_authored(const snapshot::CaptureBundle& bundle,
                                              std::string_view xpath,
                                              std::string_view property, int width) {
  return Cascade(bundle).resolve(xpath, property, width);
}

}  // namespace rlf::css
