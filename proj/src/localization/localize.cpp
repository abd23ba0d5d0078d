#include "localization/localize.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "common/error.hpp"

namespace rlf::localization {

using snapshot::BBox;
using snapshot::CaptureBundle;

const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::kHorizontal:
      return "horizontal";
    case Axis::kVertical:
      return "vertical";
    case Axis::kBoth:
      return "both";
    case Axis::kNone:
      return "none";
  }
  return "none";
}

const char* to_string(CandidateKind kind) {
  return kind == CandidateKind::kAuthored ? "authored" : "missing";
}

const char* to_string(Tier tier) { return tier == Tier::kAffected ? "affected" : "neighbor"; }

namespace {

const BBox& box_at(const CaptureBundle& bundle, std::size_t wi, std::string_view xpath) {
  const auto* e = bundle.entry(wi, bundle.require(xpath));
  if (!e) throw Error(ErrorCode::kSchema, "no geometry for " + std::string(xpath));
  return e->bbox;
}

bool is_horizontal(Boundary b) { return b == Boundary::kLeft || b == Boundary::kRight; }

Direction from_edges(const BBox& outer, const BBox& inner, double eps, bool horizontal_only) {
  struct Edge {
    Boundary side;
    double depth;
  };
  std::vector<Edge> edges;
  if (inner.x < outer.x - eps) edges.push_back({Boundary::kLeft, outer.x - inner.x});
  if (inner.right() > outer.right() + eps) {
    edges.push_back({Boundary::kRight, inner.right() - outer.right()});
  }
  if (!horizontal_only) {
    if (inner.y < outer.y - eps) edges.push_back({Boundary::kTop, outer.y - inner.y});
    if (inner.bottom() > outer.bottom() + eps) {
      edges.push_back({Boundary::kBottom, inner.bottom() - outer.bottom()});
    }
  }
  if (edges.empty()) return {Axis::kBoth, Boundary::kNone};
  const bool any_h = std::any_of(edges.begin(), edges.end(),
                                 [](const Edge& e) { return is_horizontal(e.side); });
  const bool any_v = std::any_of(edges.begin(), edges.end(),
                                 [](const Edge& e) { return !is_horizontal(e.side); });
  if (any_h && any_v) return {Axis::kBoth, Boundary::kNone};
  const auto deepest = std::max_element(
      edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.depth < b.depth; });
  return {any_h ? Axis::kHorizontal : Axis::kVertical, deepest->side};
}

}  // namespace

Direction failure_direction(const FailureReport& report, const CaptureBundle& bundle,
                            double eps) {
  const std::size_t wi = bundle.require_width(report.fail_min);
  switch (report.type) {
    case RlfType::kEP:
      return from_edges(box_at(bundle, wi, report.affected.at(1)),
                        box_at(bundle, wi, report.affected.at(0)), eps, false);
    case RlfType::kVP: {
      const BBox viewport{0, 0, static_cast<double>(report.fail_min), 0};
      return from_edges(viewport, box_at(bundle, wi, report.affected.at(0)), eps, true);
    }
    case RlfType::kEC: {
      const BBox& a = box_at(bundle, wi, report.affected.at(0));
      const BBox& b = box_at(bundle, wi, report.affected.at(1));
      const double dx = std::min(a.right(), b.right()) - std::max(a.x, b.x);
      const double dy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
      return {dx <= dy ? Axis::kHorizontal : Axis::kVertical, Boundary::kNone};
    }
    case RlfType::kWE:
      return {Axis::kBoth, Boundary::kNone};
    case RlfType::kSR:
      return {Axis::kNone, Boundary::kNone};
  }
  return {};
}

const PropertySet& property_set(RlfType type) {
  using M = MatcherKind;
  static const PropertySet kEP{RlfType::kEP,
                               {{M::kPositionAbsolute, 1, "position: absolute"},
                                {M::kFloat, 2, "float"},
                                {M::kFixedDimension, 3, "fixed height, width (px)"},
                                {M::kDisplay, 4, "display"},
                                {M::kMarginPadding, 5, "margin, padding"},
                                {M::kFontSize, 6, "font-size"},
                                {M::kWhiteSpace, 7, "white-space"}}};
  static const PropertySet kEC{RlfType::kEC,
                               {{M::kPositionAbsolute, 1, "position: absolute"},
                                {M::kFloat, 2, "float"},
                                {M::kNegativeMargin, 3, "negative margin"},
                                {M::kFixedDimension, 4, "fixed height, width"},
                                {M::kMarginPadding, 5, "margin, padding"},
                                {M::kMissingFlexWrap, 6, "display:flex without flex-wrap:wrap"},
                                {M::kMaxDimension, 7, "max-height, max-width"}}};
  static const PropertySet kVP{RlfType::kVP,
                               {{M::kPositionAbsolute, 1, "position: absolute"},
                                {M::kFloat, 2, "float"},
                                {M::kFixedDimension, 3, "fixed height, width"},
                                {M::kMarginPadding, 4, "margin, padding"},
                                {M::kFontSize, 5, "font-size"},
                                {M::kWhiteSpace, 6, "white-space"}}};
  static const PropertySet kWE{RlfType::kWE,
                               {{M::kMissingFlex, 1, "parent without display:flex"},
                                {M::kFloat, 2, "float"},
                                {M::kParentWidth, 3, "parent width"},
                                {M::kMarginPadding, 4, "margin, padding"},
                                {M::kFontSize, 5, "font-size"}}};
  switch (type) {
    case RlfType::kEP:
      return kEP;
    case RlfType::kEC:
      return kEC;
    case RlfType::kVP:
      return kVP;
    case RlfType::kWE:
      return kWE;
    case RlfType::kSR:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "small-range failures have no property set");
}

bool is_predicate(MatcherKind matcher) {
  return matcher == MatcherKind::kNegativeMargin || matcher == MatcherKind::kMissingFlexWrap ||
         matcher == MatcherKind::kMissingFlex;
}

bool axis_relevant(std::string_view property, const Direction& dir) {
  static const std::set<std::string_view> kNeutral = {"position", "float",       "display",
                                                      "font-size", "white-space", "flex-wrap"};
  static const std::set<std::string_view> kVertical = {
      "height",     "min-height",    "max-height",    "margin-top",
      "margin-bottom", "padding-top", "padding-bottom"};
  static const std::set<std::string_view> kHorizontal = {
      "width",       "min-width",    "max-width",    "margin-left",
      "margin-right", "padding-left", "padding-right"};
  switch (dir.axis) {
    case Axis::kNone:
      return false;
    case Axis::kBoth:
      return kNeutral.count(property) || kVertical.count(property) ||
             kHorizontal.count(property);
    case Axis::kVertical:
      return kNeutral.count(property) || kVertical.count(property);
    case Axis::kHorizontal:
      return kNeutral.count(property) || kHorizontal.count(property);
  }
  return false;
}

namespace {

std::vector<std::size_t> primaries(const FailureReport& report, const CaptureBundle& bundle) {
  std::vector<std::size_t> out;
  switch (report.type) {
    case RlfType::kEP:
    case RlfType::kVP:
      out.push_back(bundle.require(report.affected.at(0)));
      break;
    case RlfType::kEC:
    case RlfType::kWE:
      for (const auto& x : report.affected) out.push_back(bundle.require(x));
      break;
    case RlfType::kSR:
      break;
  }
  return out;
}

bool aligned(const BBox& a, const BBox& b, Axis axis) {
  const bool x_overlap = std::min(a.right(), b.right()) > std::max(a.x, b.x);
  const bool y_overlap = std::min(a.bottom(), b.bottom()) > std::max(a.y, b.y);
  switch (axis) {
    case Axis::kVertical:
      return x_overlap;
    case Axis::kHorizontal:
      return y_overlap;
    case Axis::kBoth:
      return x_overlap || y_overlap;
    case Axis::kNone:
      return false;
  }
  return false;
}

}  // namespace

std::vector<NeighborElement> neighbor_elements(const FailureReport& report,
                                               const CaptureBundle& bundle,
                                               const Direction& dir,
                                               const NeighborOptions& options) {
  if (options.hops < 1) throw Error(ErrorCode::kInvalidArgument, "hops must be at least 1");
  const std::size_t wi = bundle.require_width(report.fail_min);
  const auto pool = detection::build_pool(bundle);
  const auto seeds = primaries(report, bundle);

  std::map<std::size_t, Role> roles;
  auto add_container = [&](std::size_t node) {
    if (pool.animated[node] || bundle.node(node).tag() == "html") return;
    roles.emplace(node, Role::kContainer);
  };
  auto is_aligned = [&](std::size_t node) {
    if (!detection::usable(bundle, wi, node)) return false;
    const BBox& b = bundle.entry(wi, node)->bbox;
    return std::any_of(seeds.begin(), seeds.end(), [&](std::size_t s) {
      return detection::usable(bundle, wi, s) &&
             aligned(bundle.entry(wi, s)->bbox, b, dir.axis);
    });
  };

  for (std::size_t s : seeds) roles[s] = Role::kElement;
  if ((report.type == RlfType::kEP || report.type == RlfType::kVP) &&
      report.affected.size() > 1) {
    add_container(bundle.require(report.affected[1]));
  }

  std::set<std::size_t> anchors(seeds.begin(), seeds.end());
  for (int level = 0; level < options.hops; ++level) {
    std::set<std::size_t> parents;
    for (std::size_t a : anchors) {
      const int p = bundle.node(a).parent;
      if (p < 0) continue;
      const auto parent = static_cast<std::size_t>(p);
      parents.insert(parent);
      for (std::size_t sib : bundle.node(parent).children) {
        if (sib == a || !pool.eligible[sib] || !is_aligned(sib)) continue;
        auto it = roles.find(sib);
        if (it == roles.end() || it->second == Role::kContainer) roles[sib] = Role::kElement;
      }
    }
    for (std::size_t p : parents) add_container(p);
    anchors = std::move(parents);
  }

  std::vector<NeighborElement> out;
  for (const auto& [node, role] : roles) out.push_back({node, role});
  return out;
}

std::vector<std::string> neighbor_search(const FailureReport& report,
                                         const CaptureBundle& bundle, const Direction& dir,
                                         const NeighborOptions& options) {
  std::vector<std::string> out;
  for (const auto& n : neighbor_elements(report, bundle, dir, options)) {
    out.push_back(bundle.node(n.node).xpath());
  }
  return out;
}

namespace {

constexpr std::string_view kBoxSides[] = {"margin-top",  "margin-right",  "margin-bottom",
                                          "margin-left", "padding-top",   "padding-right",
                                          "padding-bottom", "padding-left"};
constexpr std::string_view kMargins[] = {"margin-top", "margin-right", "margin-bottom",
                                         "margin-left"};

std::string keyword(const css::AuthoredValue& v) {
  std::string s = css::to_lower(css::trim(v.raw_value));
  return s;
}

bool is_flex_display(std::string_view display) {
  return display == "flex" || display == "inline-flex";
}

class Collector {
 public:
  Collector(const FailureReport& report, const css::Cascade& cascade, const Direction& dir)
      : report_(report), cascade_(cascade), dir_(dir), width_(report.fail_min) {}

  void element(std::size_t node, Role role, const SetEntry& entry) {
    using M = MatcherKind;
    const bool container = role == Role::kContainer;
    if (container && !is_predicate(entry.matcher) && entry.matcher != M::kParentWidth) return;
    if (!container && (entry.matcher == M::kMissingFlex || entry.matcher == M::kParentWidth)) {
      return;
    }
    switch (entry.matcher) {
      case M::kPositionAbsolute:
        if (auto v = resolve(node, "position"); v && keyword(*v) == "absolute") {
          emit(node, "position", CandidateKind::kAuthored, v, std::nullopt, entry.rank);
        }
        break;
      case M::kFloat:
        if (auto v = resolve(node, "float"); v && keyword(*v) != "none") {
          emit(node, "float", CandidateKind::kAuthored, v, std::nullopt, entry.rank);
        }
        break;
      case M::kFixedDimension:
        for (std::string_view p : {"height", "width"}) {
          if (auto v = resolve(node, p); v && css::is_px_length(v->raw_value)) {
            emit(node, p, CandidateKind::kAuthored, v, v->normalized_px, entry.rank);
          }
        }
        break;
      case M::kDisplay:
        if (auto v = resolve(node, "display")) {
          emit(node, "display", CandidateKind::kAuthored, v, std::nullopt, entry.rank);
        }
        break;
      case M::kMarginPadding:
        for (std::string_view p : kBoxSides) {
          if (auto v = resolve(node, p); v && v->normalized_px && *v->normalized_px != 0) {
            emit(node, p, CandidateKind::kAuthored, v, v->normalized_px, entry.rank);
          }
        }
        break;
      case M::kFontSize:
        if (auto v = resolve(node, "font-size")) {
          emit(node, "font-size", CandidateKind::kAuthored, v, v->normalized_px, entry.rank);
        }
        break;
      case M::kWhiteSpace:
        if (auto v = resolve(node, "white-space")) {
          emit(node, "white-space", CandidateKind::kAuthored, v, std::nullopt, entry.rank);
        }
        break;
      case M::kNegativeMargin:
        for (std::string_view p : kMargins) {
          if (auto v = resolve(node, p); v && v->normalized_px && *v->normalized_px < 0) {
            emit(node, p, CandidateKind::kAuthored, v, std::nullopt, entry.rank);
          }
        }
        break;
      case M::kMissingFlexWrap: {
        if (!is_flex_display(computed_display(node))) break;
        auto v = resolve(node, "flex-wrap");
        if (!v) {
          emit(node, "flex-wrap", CandidateKind::kMissing, std::nullopt, std::nullopt,
               entry.rank);
        } else if (keyword(*v) != "wrap" && keyword(*v) != "wrap-reverse") {
          emit(node, "flex-wrap", CandidateKind::kAuthored, v, std::nullopt, entry.rank);
        }
        break;
      }
      case M::kMaxDimension:
        for (std::string_view p : {"max-height", "max-width"}) {
          if (auto v = resolve(node, p); v && v->normalized_px) {
            emit(node, p, CandidateKind::kAuthored, v, v->normalized_px, entry.rank);
          }
        }
        break;
      case M::kMissingFlex: {
        if (is_flex_display(computed_display(node))) break;
        auto v = resolve(node, "display");
        emit(node, "display", v ? CandidateKind::kAuthored : CandidateKind::kMissing, v,
             std::nullopt, entry.rank);
        break;
      }
      case M::kParentWidth:
        if (auto v = resolve(node, "width"); v && v->normalized_px) {
          emit(node, "width", CandidateKind::kAuthored, v, v->normalized_px, entry.rank);
        }
        break;
    }
  }

  std::vector<Candidate> take() {
    std::vector<Candidate> out;
    for (auto& [key, c] : found_) out.push_back(std::move(c));
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.doc_order, a.set_rank, a.property) <
             std::tie(b.doc_order, b.set_rank, b.property);
    });
    return out;
  }

 private:
  std::optional<css::AuthoredValue> resolve(std::size_t node, std::string_view property) const {
    return cascade_.resolve(node, property, width_);
  }

  std::string computed_display(std::size_t node) const {
    const auto& bundle = cascade_.bundle();
    const auto* e = bundle.entry(bundle.require_width(width_), node);
    return e ? e->computed.display : std::string();
  }

  void emit(std::size_t node, std::string_view property, CandidateKind kind,
            std::optional<css::AuthoredValue> authored, std::optional<double> px, int rank) {
    if (!axis_relevant(property, dir_)) return;
    const auto& xpath = cascade_.bundle().node(node).xpath();
    const std::pair<std::size_t, std::string> key{node, std::string(property)};
    auto it = found_.find(key);
    if (it != found_.end() && it->second.set_rank <= rank) return;
    Candidate c;
    c.xpath = xpath;
    c.property = std::string(property);
    c.kind = kind;
    c.authored = std::move(authored);
    c.normalized_px = px;
    c.tier = std::find(report_.affected.begin(), report_.affected.end(), xpath) !=
                     report_.affected.end()
                 ? Tier::kAffected
                 : Tier::kNeighbor;
    c.set_rank = rank;
    c.doc_order = node;
    found_[key] = std::move(c);
  }

  const FailureReport& report_;
  const css::Cascade& cascade_;
  Direction dir_;
  int width_;
  std::map<std::pair<std::size_t, std::string>, Candidate> found_;
};

}  // namespace

std::vector<Candidate> collect_candidates(const FailureReport& report,
                                          const css::Cascade& cascade,
                                          const NeighborOptions& options) {
  const auto& bundle = cascade.bundle();
  const Direction dir = failure_direction(report, bundle, options.eps);
  const PropertySet& set = property_set(report.type);
  Collector collector(report, cascade, dir);
  for (const auto& n : neighbor_elements(report, bundle, dir, options)) {
    for (const auto& entry : set.entries) collector.element(n.node, n.role, entry);
  }
  return collector.take();
}

namespace {

RuleRef rule_ref(const css::Cascade& cascade, const css::StyleRule& rule, std::size_t node,
                 std::string_view property) {
  RuleRef ref;
  ref.source = rule.source;
  ref.media = rule.media ? rule.media->text : std::string();
  const auto spec = cascade.match_rule(rule, node);
  for (const auto& sel : rule.selectors) {
    if (cascade.matches(sel, node) && spec && css::specificity(sel) == *spec) {
      ref.selector = sel.text;
      break;
    }
  }
  for (const auto& d : rule.declarations) {
    if (d.property == property) ref.raw_value = d.raw_value;
  }
  return ref;
}

}  // namespace

std::vector<MediaConflict> localize_small_range(const FailureReport& report,
                                                const css::Cascade& cascade) {
  const auto& bundle = cascade.bundle();
  const auto widths = bundle.widths();
  const std::size_t lo = bundle.require_width(report.fail_min);
  const std::size_t hi = bundle.require_width(report.fail_max);
  const auto pool = detection::build_pool(bundle);
  const auto& rules = cascade.rules();

  auto active_at = [&](const css::StyleRule& r, std::size_t wi) {
    return css::media_active(*r.media, widths[wi]);
  };

  std::vector<MediaConflict> out;
  for (std::size_t node = 0; node < bundle.node_count(); ++node) {
    if (!pool.eligible[node]) continue;
    std::vector<std::size_t> live;
    for (std::size_t r : cascade.matched_rules(node)) {
      if (!rules[r].media) continue;
      bool all = true;
      for (std::size_t wi = lo; wi <= hi && all; ++wi) all = active_at(rules[r], wi);
      if (all) live.push_back(r);
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        const auto& a = rules[live[i]];
        const auto& b = rules[live[j]];
        std::set<std::string> shared;
        for (const auto& da : a.declarations) {
          for (const auto& db : b.declarations) {
            if (da.property == db.property) shared.insert(da.property);
          }
        }
        if (shared.empty()) continue;
        std::size_t first = lo;
        std::size_t last = hi;
        while (first > 0 && active_at(a, first - 1) && active_at(b, first - 1)) --first;
        while (last + 1 < widths.size() && active_at(a, last + 1) && active_at(b, last + 1)) {
          ++last;
        }
        for (const auto& property : shared) {
          out.push_back({bundle.node(node).xpath(), property,
                         rule_ref(cascade, a, node, property),
                         rule_ref(cascade, b, node, property), widths[first], widths[last]});
        }
      }
    }
  }
  return out;
}

std::vector<Candidate> small_range_candidates(const FailureReport& report,
                                              const css::Cascade& cascade,
                                              const std::vector<MediaConflict>& conflicts) {
  std::vector<Candidate> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& c : conflicts) {
    if (!seen.emplace(c.xpath, c.property).second) continue;
    auto v = cascade.resolve(c.xpath, c.property, report.fail_min);
    if (!v) continue;
    Candidate cand;
    cand.xpath = c.xpath;
    cand.property = c.property;
    cand.kind = CandidateKind::kAuthored;
    cand.normalized_px = v->normalized_px;
    cand.authored = std::move(v);
    cand.tier = Tier::kAffected;
    cand.set_rank = 1;
    cand.doc_order = cascade.bundle().require(c.xpath);
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace rlf::localization
