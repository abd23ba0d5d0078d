#include <cctype>

#include "css/stylesheet.hpp"

namespace rlf::css {
namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::optional<Selector> fail(std::string* error, std::string message) {
  if (error) *error = std::move(message);
  return std::nullopt;
}

}  // namespace

std::optional<Selector> parse_selector(std::string_view text, std::string* error) {
  Selector sel;
  sel.text = std::string(trim(text));
  const std::string_view s = sel.text;
  if (s.empty()) return fail(error, "empty selector");

  CompoundSelector current;
  std::optional<Combinator> pending;
  std::size_t i = 0;

  auto read_name = [&](std::size_t from) {
    std::size_t end = from;
    while (end < s.size() && is_name_char(s[end])) ++end;
    return end;
  };
  auto flush = [&]() -> bool {
    if (current.empty()) return false;
    if (!sel.compounds.empty()) {
      sel.combinators.push_back(pending.value_or(Combinator::kDescendant));
    }
    sel.compounds.push_back(std::move(current));
    current.clear();
    pending.reset();
    return true;
  };

  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '>') {
      bool child = false;
      while (i < s.size() &&
             (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '>')) {
        if (s[i] == '>') {
          if (child) return fail(error, "doubled child combinator");
          child = true;
        }
        ++i;
      }
      if (!flush()) {
        if (child || sel.compounds.empty()) {
          return fail(error, "combinator without a left-hand compound");
        }
      }
      pending = child ? Combinator::kChild : Combinator::kDescendant;
      if (i >= s.size()) return fail(error, "dangling combinator");
      continue;
    }
    if (c == '+' || c == '~') return fail(error, "sibling combinators are not supported");
    if (c == ':') return fail(error, "pseudo-classes and pseudo-elements are not supported");
    if (c == ',') return fail(error, "unexpected ',' inside a single selector");
    if (c == '*') {
      current.push_back({SimpleSelector::Kind::kUniversal, "*"});
      ++i;
      continue;
    }
    if (c == '.' || c == '#') {
      const std::size_t end = read_name(i + 1);
      if (end == i + 1) return fail(error, std::string("missing name after '") + c + "'");
      current.push_back({c == '.' ? SimpleSelector::Kind::kClass : SimpleSelector::Kind::kId,
                         std::string(s.substr(i + 1, end - i - 1))});
      i = end;
      continue;
    }
    if (c == '[') {
      const std::size_t close = s.find(']', i);
      if (close == std::string_view::npos) return fail(error, "unterminated attribute selector");
      const std::string_view inner = trim(s.substr(i + 1, close - i - 1));
      if (inner.empty()) return fail(error, "empty attribute selector");
      for (char ch : inner) {
        if (!is_name_char(ch)) {
          return fail(error, "only attribute-presence selectors are supported");
        }
      }
      current.push_back({SimpleSelector::Kind::kAttribute, to_lower(inner)});
      i = close + 1;
      continue;
    }
    if (is_name_char(c)) {
      if (!current.empty()) return fail(error, "type selector must start a compound");
      const std::size_t end = read_name(i);
      current.push_back({SimpleSelector::Kind::kType, to_lower(s.substr(i, end - i))});
      i = end;
      continue;
    }
    return fail(error, std::string("unexpected character '") + c + "'");
  }
  flush();
  if (sel.compounds.empty()) return fail(error, "empty selector");
  return sel;
}

Specificity specificity(const Selector& selector) {
  Specificity spec;
  for (const auto& compound : selector.compounds) {
    for (const auto& simple : compound) {
      switch (simple.kind) {
        case SimpleSelector::Kind::kId:
          ++spec.a;
          break;
        case SimpleSelector::Kind::kClass:
        case SimpleSelector::Kind::kAttribute:
          ++spec.b;
          break;
        case SimpleSelector::Kind::kType:
          ++spec.c;
          break;
        case SimpleSelector::Kind::kUniversal:
          break;
      }
    }
  }
  return spec;
}

}  // namespace rlf::css
