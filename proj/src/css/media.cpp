#include <cctype>

#include "css/stylesheet.hpp"

namespace rlf::css {
namespace {

constexpr double kEmPx = 16.0;

std::optional<MediaCondition> fail(std::string* error, std::string message) {
  if (error) *error = std::move(message);
  return std::nullopt;
}

std::optional<double> parse_media_length(std::string_view v) {
  v = trim(v);
  std::size_t unit = 0;
  while (unit < v.size() && (std::isdigit(static_cast<unsigned char>(v[unit])) ||
                             v[unit] == '.' || v[unit] == '-' || v[unit] == '+')) {
    ++unit;
  }
  if (unit == 0) return std::nullopt;
  double number = 0;
  const std::string digits(v.substr(0, unit));
  try {
    std::size_t used = 0;
    number = std::stod(digits, &used);
    if (used != digits.size()) return std::nullopt;
  } catch (...) {
    return std::nullopt;
  }
  const std::string suffix = to_lower(v.substr(unit));
  if (suffix == "px") return number;
  if (suffix == "em" || suffix == "rem") return number * kEmPx;
  if (suffix.empty() && number == 0) return 0.0;
  return std::nullopt;
}

std::vector<std::string_view> split_top(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

std::optional<MediaQuery> parse_query(std::string_view text, std::string* error) {
  MediaQuery q;
  std::string_view s = trim(text);
  if (s.empty()) {
    if (error) *error = "empty media query";
    return std::nullopt;
  }
  bool expect_and = false;
  bool saw_type = false;
  while (!s.empty()) {
    if (s.front() == '(') {
      if (expect_and) {
        if (error) *error = "expected 'and' between media features";
        return std::nullopt;
      }
      const std::size_t close = s.find(')');
      if (close == std::string_view::npos) {
        if (error) *error = "unterminated media feature";
        return std::nullopt;
      }
      const std::string_view inner = s.substr(1, close - 1);
      const std::size_t colon = inner.find(':');
      if (colon == std::string_view::npos) {
        if (error) *error = "unsupported media feature '" + std::string(inner) + "'";
        return std::nullopt;
      }
      const std::string name = to_lower(trim(inner.substr(0, colon)));
      MediaFeature f;
      if (name == "min-width") {
        f.kind = MediaFeature::Kind::kMinWidth;
      } else if (name == "max-width") {
        f.kind = MediaFeature::Kind::kMaxWidth;
      } else {
        if (error) *error = "unsupported media feature '" + name + "'";
        return std::nullopt;
      }
      auto px = parse_media_length(inner.substr(colon + 1));
      if (!px) {
        if (error) *error = "unsupported media length in '" + std::string(inner) + "'";
        return std::nullopt;
      }
      f.px = *px;
      q.features.push_back(f);
      s = trim(s.substr(close + 1));
      expect_and = true;
      continue;
    }
    std::size_t end = 0;
    while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])) &&
           s[end] != '(') {
      ++end;
    }
    const std::string word = to_lower(s.substr(0, end));
    s = trim(s.substr(end));
    if (word == "and") {
      if (!expect_and) {
        if (error) *error = "misplaced 'and'";
        return std::nullopt;
      }
      expect_and = false;
      continue;
    }
    if (word == "only" && !saw_type && !expect_and) continue;
    if (saw_type || expect_and) {
      if (error) *error = "unexpected '" + word + "' in media query";
      return std::nullopt;
    }
    if (word == "all" || word == "screen") {
      saw_type = true;
      expect_and = true;
      continue;
    }
    if (word == "print" || word == "speech" || word == "tty" || word == "tv" ||
        word == "projection" || word == "handheld" || word == "braille" ||
        word == "embossed" || word == "aural") {
      q.never = true;
      saw_type = true;
      expect_and = true;
      continue;
    }
    if (error) *error = "unsupported media query term '" + word + "'";
    return std::nullopt;
  }
  if (!expect_and) {
    if (error) *error = "media query ends with 'and'";
    return std::nullopt;
  }
  return q;
}

}  // namespace

std::optional<MediaCondition> parse_media_condition(std::string_view text,
                                                    std::string* error) {
  MediaCondition cond;
  cond.text = std::string(trim(text));
  for (std::string_view part : split_top(cond.text, ',')) {
    std::string why;
    auto q = parse_query(part, &why);
    if (!q) return fail(error, why);
    cond.queries.push_back(std::move(*q));
  }
  return cond;
}

bool media_active(const MediaCondition& condition, double width) {
  for (const auto& q : condition.queries) {
    if (q.never) continue;
    bool ok = true;
    for (const auto& f : q.features) {
      if (f.kind == MediaFeature::Kind::kMinWidth ? width < f.px : width > f.px) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

MediaCondition media_and(const MediaCondition& outer, const MediaCondition& inner) {
  MediaCondition out;
  out.text = outer.text + " and " + inner.text;
  for (const auto& a : outer.queries) {
    for (const auto& b : inner.queries) {
      MediaQuery q;
      q.never = a.never || b.never;
      q.features = a.features;
      q.features.insert(q.features.end(), b.features.begin(), b.features.end());
      out.queries.push_back(std::move(q));
    }
  }
  return out;
}

}  // namespace rlf::css
