#include <algorithm>
#include <array>
#include <cctype>

#include "css/stylesheet.hpp"

namespace rlf::css {

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

namespace {

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) {
        out += text[++i];
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      out += c;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      const std::size_t end = text.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

// Index of the first top-level occurrence of any char in `stops`, skipping
// strings and parenthesized groups; npos if none.
std::size_t find_top(std::string_view s, std::size_t from, std::string_view stops) {
  int parens = 0;
  int brackets = 0;
  char quote = 0;
  for (std::size_t i = from; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '(') {
      ++parens;
    } else if (c == ')') {
      parens = std::max(0, parens - 1);
    } else if (c == '[') {
      ++brackets;
    } else if (c == ']') {
      brackets = std::max(0, brackets - 1);
    } else if (parens == 0 && brackets == 0 && stops.find(c) != std::string_view::npos) {
      return i;
    }
  }
  return std::string_view::npos;
}

// Given the index of '{', returns the index of its matching '}' (or size()).
std::size_t match_brace(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size();) {
    const std::size_t next = find_top(s, i, "{}");
    if (next == std::string_view::npos) return s.size();
    depth += s[next] == '{' ? 1 : -1;
    if (depth == 0) return next;
    i = next + 1;
  }
  return s.size();
}

std::vector<std::string_view> split_top_level(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  const char stops[2] = {sep, 0};
  while (true) {
    const std::size_t next = find_top(s, start, std::string_view(stops, 1));
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, next - start));
    start = next + 1;
  }
}

std::vector<std::string> split_values(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  int parens = 0;
  for (char c : s) {
    if (c == '(') ++parens;
    if (c == ')') --parens;
    if (std::isspace(static_cast<unsigned char>(c)) && parens == 0) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

void expand_box(const std::string& prefix, const std::string& value, bool important,
                std::vector<Declaration>& out, std::vector<std::string>* warnings) {
  const auto parts = split_values(value);
  if (parts.empty() || parts.size() > 4) {
    if (warnings) warnings->push_back("skipped malformed '" + prefix + ": " + value + "'");
    return;
  }
  // top, right, bottom, left
  std::array<std::string, 4> sides;
  switch (parts.size()) {
    case 1:
      sides = {parts[0], parts[0], parts[0], parts[0]};
      break;
    case 2:
      sides = {parts[0], parts[1], parts[0], parts[1]};
      break;
    case 3:
      sides = {parts[0], parts[1], parts[2], parts[1]};
      break;
    default:
      sides = {parts[0], parts[1], parts[2], parts[3]};
      break;
  }
  static constexpr std::array<const char*, 4> kSides = {"-top", "-right", "-bottom",
                                                        "-left"};
  for (std::size_t i = 0; i < 4; ++i) {
    out.push_back({prefix + kSides[i], sides[i], important});
  }
}

void expand_flex_flow(const std::string& value, bool important,
                      std::vector<Declaration>& out, std::vector<std::string>* warnings) {
  const auto parts = split_values(value);
  const std::string lowered = to_lower(value);
  if (parts.size() == 1 && (lowered == "inherit" || lowered == "initial" ||
                            lowered == "unset" || lowered == "revert")) {
    out.push_back({"flex-direction", parts[0], important});
    out.push_back({"flex-wrap", parts[0], important});
    return;
  }
  bool ok = !parts.empty() && parts.size() <= 2;
  std::vector<Declaration> expanded;
  for (const auto& p : parts) {
    const std::string v = to_lower(p);
    if (v == "row" || v == "row-reverse" || v == "column" || v == "column-reverse") {
      expanded.push_back({"flex-direction", p, important});
    } else if (v == "nowrap" || v == "wrap" || v == "wrap-reverse") {
      expanded.push_back({"flex-wrap", p, important});
    } else {
      ok = false;
    }
  }
  if (!ok) {
    if (warnings) warnings->push_back("skipped malformed 'flex-flow: " + value + "'");
    return;
  }
  out.insert(out.end(), expanded.begin(), expanded.end());
}

struct SheetParser {
  int sheet_index = 0;
  int rule_counter = 0;
  ParseResult result;

  void warn(std::string message) {
    result.warnings.push_back("sheet " + std::to_string(sheet_index) + ": " +
                              std::move(message));
  }

  void parse_block(std::string_view s, const std::optional<MediaCondition>& media,
                   bool drop) {
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) ||
                              s[i] == ';')) {
        ++i;
      }
      if (i >= s.size()) break;
      if (s[i] == '}') {
        warn("stray '}'");
        ++i;
        continue;
      }
      const std::size_t stop = find_top(s, i, "{;}");
      if (stop == std::string_view::npos) {
        warn("unterminated construct '" + std::string(trim(s.substr(i))) + "'");
        break;
      }
      const std::string_view prelude = trim(s.substr(i, stop - i));
      if (s[stop] == ';' || s[stop] == '}') {
        if (!prelude.empty()) warn("skipped statement '" + std::string(prelude) + "'");
        i = stop + 1;
        continue;
      }
      const std::size_t close = match_brace(s, stop);
      const std::string_view body =
          s.substr(stop + 1, (close == s.size() ? s.size() : close) - stop - 1);
      i = close == s.size() ? s.size() : close + 1;

      if (!prelude.empty() && prelude.front() == '@') {
        parse_at_rule(prelude, body, media, drop);
      } else {
        parse_style_rule(prelude, body, media, drop);
      }
    }
  }

  void parse_at_rule(std::string_view prelude, std::string_view body,
                     const std::optional<MediaCondition>& media, bool drop) {
    std::size_t end = 1;
    while (end < prelude.size() &&
           (std::isalnum(static_cast<unsigned char>(prelude[end])) || prelude[end] == '-')) {
      ++end;
    }
    const std::string keyword = to_lower(prelude.substr(1, end - 1));
    const std::string_view rest = trim(prelude.substr(end));
    if (keyword == "media") {
      std::string why;
      auto cond = parse_media_condition(rest, &why);
      if (!cond) {
        warn("skipped @media (" + why + ")");
        parse_block(body, media, true);
        return;
      }
      std::optional<MediaCondition> combined =
          media ? media_and(*media, *cond) : std::move(*cond);
      parse_block(body, combined, drop);
      return;
    }
    if (keyword == "supports") {
      warn("skipped @supports block");
      parse_block(body, media, true);
      return;
    }
    warn("skipped @" + keyword + " block");
  }

  void parse_style_rule(std::string_view prelude, std::string_view body,
                        const std::optional<MediaCondition>& media, bool drop) {
    const int ordinal = rule_counter++;
    if (drop) return;
    StyleRule rule;
    rule.media = media;
    rule.source = SourceRef{sheet_index, ordinal};
    for (std::string_view part : split_top_level(prelude, ',')) {
      std::string why;
      auto sel = parse_selector(part, &why);
      if (sel) {
        rule.selectors.push_back(std::move(*sel));
      } else {
        warn("skipped selector '" + std::string(trim(part)) + "' (" + why + ")");
      }
    }
    if (rule.selectors.empty()) return;
    rule.declarations = parse_declarations(body, &result.warnings);
    result.rules.push_back(std::move(rule));
  }
};

}  // namespace

std::vector<Declaration> parse_declarations(std::string_view block,
                                            std::vector<std::string>* warnings) {
  std::vector<Declaration> out;
  const std::string text = strip_comments(block);
  for (std::string_view item : split_top_level(text, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) {
      if (warnings) warnings->push_back("skipped declaration '" + std::string(item) + "'");
      continue;
    }
    const std::string property = to_lower(trim(item.substr(0, colon)));
    std::string_view value = trim(item.substr(colon + 1));
    bool important = false;
    if (const std::size_t bang = find_top(value, 0, "!"); bang != std::string_view::npos) {
      if (to_lower(trim(value.substr(bang + 1))) != "important") {
        if (warnings) warnings->push_back("skipped declaration '" + std::string(item) + "'");
        continue;
      }
      important = true;
      value = trim(value.substr(0, bang));
    }
    if (property.empty() || value.empty()) {
      if (warnings) warnings->push_back("skipped declaration '" + std::string(item) + "'");
      continue;
    }
    const std::string v(value);
    if (property == "margin" || property == "padding") {
      expand_box(property, v, important, out, warnings);
    } else if (property == "flex-flow") {
      expand_flex_flow(v, important, out, warnings);
    } else {
      out.push_back({property, v, important});
    }
  }
  return out;
}

ParseResult parse_stylesheet(std::string_view text, int sheet_index) {
  SheetParser parser;
  parser.sheet_index = sheet_index;
  const std::string clean = strip_comments(text);
  parser.parse_block(clean, std::nullopt, false);
  return std::move(parser.result);
}

std::optional<double> normalize_length(std::string_view raw_value,
                                       const LengthContext& context) {
  const std::string v = to_lower(trim(raw_value));
  if (v.empty()) return std::nullopt;
  std::size_t pos = 0;
  if (v[pos] == '+' || v[pos] == '-') ++pos;
  const std::size_t digits_start = pos;
  bool seen_digit = false;
  bool seen_dot = false;
  while (pos < v.size()) {
    if (std::isdigit(static_cast<unsigned char>(v[pos]))) {
      seen_digit = true;
    } else if (v[pos] == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
    ++pos;
  }
  if (!seen_digit || pos == digits_start) return std::nullopt;
  double number = 0;
  try {
    number = std::stod(v.substr(0, pos));
  } catch (...) {
    return std::nullopt;
  }
  const std::string unit = v.substr(pos);
  if (unit == "px") return number;
  if (unit == "em") return number * context.element_font_size;
  if (unit == "rem") return number * context.root_font_size;
  if (unit == "%") return number * context.parent_extent / 100.0;
  if (unit == "vw") return number * context.viewport_width / 100.0;
  if (unit == "vh") return number * context.viewport_height / 100.0;
  if (unit.empty() && number == 0) return 0.0;
  return std::nullopt;
}

bool is_px_length(std::string_view raw_value) {
  const std::string v = to_lower(trim(raw_value));
  if (v.size() < 3 || v.compare(v.size() - 2, 2, "px") != 0) return false;
  return normalize_length(v, LengthContext{}).has_value();
}

}  // namespace rlf::css
