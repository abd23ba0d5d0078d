#include "detection/detect.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace rlf::detection {

using snapshot::BBox;
using snapshot::CaptureBundle;

const char* to_string(RlfType type) {
  switch (type) {
    case RlfType::kEC:
      return "EC";
    case RlfType::kEP:
      return "EP";
    case RlfType::kVP:
      return "VP";
    case RlfType::kWE:
      return "WE";
    case RlfType::kSR:
      return "SR";
  }
  return "?";
}

const char* to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::kLeft:
      return "left";
    case Boundary::kRight:
      return "right";
    case Boundary::kTop:
      return "top";
    case Boundary::kBottom:
      return "bottom";
    case Boundary::kNone:
      return "none";
  }
  return "none";
}

const char* to_string(Observability observability) {
  switch (observability) {
    case Observability::kUnknown:
      return "unknown";
    case Observability::kObservable:
      return "observable";
    case Observability::kNoi:
      return "noi";
  }
  return "unknown";
}

std::optional<RlfType> parse_rlf_type(std::string_view text) {
  for (RlfType t : {RlfType::kEC, RlfType::kEP, RlfType::kVP, RlfType::kWE, RlfType::kSR}) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

std::optional<Boundary> parse_boundary(std::string_view text) {
  for (Boundary b : {Boundary::kLeft, Boundary::kRight, Boundary::kTop, Boundary::kBottom,
                     Boundary::kNone}) {
    if (text == to_string(b)) return b;
  }
  return std::nullopt;
}

std::optional<Observability> parse_observability(std::string_view text) {
  for (Observability o :
       {Observability::kUnknown, Observability::kObservable, Observability::kNoi}) {
    if (text == to_string(o)) return o;
  }
  return std::nullopt;
}

bool intersects(const BBox& a, const BBox& b, double eps) {
  const double dx = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double dy = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return dx > eps && dy > eps;
}

bool contains(const BBox& parent, const BBox& child, double eps) {
  return child.x >= parent.x - eps && child.y >= parent.y - eps &&
         child.right() <= parent.right() + eps && child.bottom() <= parent.bottom() + eps;
}

std::string failure_id(RlfType type, int fail_min, int fail_max,
                       const std::vector<std::string>& affected) {
  // FNV-1a over the affected xpaths.
  std::uint32_t hash = 2166136261u;
  for (const auto& xpath : affected) {
    for (unsigned char c : xpath) {
      hash ^= c;
      hash *= 16777619u;
    }
    hash ^= '\n';
    hash *= 16777619u;
  }
  std::string type_name = to_string(type);
  std::transform(type_name.begin(), type_name.end(), type_name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", hash);
  return type_name + "-" + std::to_string(fail_min) + "-" + std::to_string(fail_max) +
         "-" + buf;
}

namespace {

using Key = std::pair<RlfType, std::vector<std::string>>;

void sort_reports(std::vector<FailureReport>& reports) {
  std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fail_min, a.type, a.affected, a.fail_max) <
           std::tie(b.fail_min, b.type, b.affected, b.fail_max);
  });
}

}  // namespace

std::vector<FailureReport> merge_ranges(std::span<const Hit> hits, int step) {
  std::map<Key, std::vector<const Hit*>> groups;
  for (const auto& h : hits) groups[{h.type, h.affected}].push_back(&h);

  std::vector<FailureReport> out;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const Hit* a, const Hit* b) { return a->width < b->width; });
    group.erase(std::unique(group.begin(), group.end(),
                            [](const Hit* a, const Hit* b) { return a->width == b->width; }),
                group.end());
    std::size_t start = 0;
    for (std::size_t i = 1; i <= group.size(); ++i) {
      const bool breaks = i == group.size() || group[i]->width != group[i - 1]->width + step;
      if (!breaks) continue;
      FailureReport r;
      r.type = key.first;
      r.affected = key.second;
      r.fail_min = group[start]->width;
      r.fail_max = group[i - 1]->width;
      r.boundary = group[start]->boundary;
      r.id = failure_id(r.type, r.fail_min, r.fail_max, r.affected);
      out.push_back(std::move(r));
      start = i;
    }
  }
  sort_reports(out);
  return out;
}

bool usable(const CaptureBundle& bundle, std::size_t width_index, std::size_t node) {
  const auto* e = bundle.entry(width_index, node);
  return e != nullptr && e->visible && e->bbox.w > 0 && e->bbox.h > 0;
}

ElementPool build_pool(const CaptureBundle& bundle) {
  static const std::set<std::string> kNonRendered = {
      "html", "body", "head", "script", "style", "meta", "link", "title",
      "noscript", "template", "base", "br"};
  const std::size_t n = bundle.node_count();
  ElementPool pool;
  pool.eligible.assign(n, false);
  pool.animated.assign(n, false);
  std::vector<bool> in_head(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = bundle.node(i);
    bool self_animated = false;
    for (std::size_t wi = 0; wi < bundle.widths().size() && !self_animated; ++wi) {
      if (const auto* e = bundle.entry(wi, i)) {
        self_animated = e->computed.has_transition || e->computed.has_transform;
      }
    }
    const bool parent_animated =
        node.parent >= 0 && pool.animated[static_cast<std::size_t>(node.parent)];
    pool.animated[i] = self_animated || parent_animated;
    in_head[i] = node.tag() == "head" ||
                 (node.parent >= 0 && in_head[static_cast<std::size_t>(node.parent)]);
    pool.eligible[i] =
        !pool.animated[i] && !in_head[i] && kNonRendered.count(node.tag()) == 0;
  }
  return pool;
}

namespace {

struct Edge {
  Boundary side;
  double depth;
};

// Edges of `inner` lying outside `outer` by more than eps.
std::vector<Edge> violations(const BBox& outer, const BBox& inner, double eps) {
  std::vector<Edge> out;
  if (inner.x < outer.x - eps) out.push_back({Boundary::kLeft, outer.x - inner.x});
  if (inner.right() > outer.right() + eps) {
    out.push_back({Boundary::kRight, inner.right() - outer.right()});
  }
  if (inner.y < outer.y - eps) out.push_back({Boundary::kTop, outer.y - inner.y});
  if (inner.bottom() > outer.bottom() + eps) {
    out.push_back({Boundary::kBottom, inner.bottom() - outer.bottom()});
  }
  return out;
}

Boundary deepest(const std::vector<Edge>& edges) {
  Boundary best = Boundary::kNone;
  double depth = -1;
  for (const auto& e : edges) {
    if (e.depth > depth) {
      depth = e.depth;
      best = e.side;
    }
  }
  return best;
}

bool shares_row(const BBox& a, const BBox& b, double fraction) {
  const double overlap = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return overlap > 0 && overlap >= fraction * std::min(a.h, b.h);
}

std::uint64_t relation(std::uint64_t kind, std::size_t a, std::size_t b) {
  return (kind << 60) | (static_cast<std::uint64_t>(a) << 30) | static_cast<std::uint64_t>(b);
}

class Detector {
 public:
  Detector(const CaptureBundle& bundle, const DetectOptions& options)
      : b_(bundle), opt_(options), pool_(build_pool(bundle)) {
    const std::size_t n = b_.node_count();
    ancestor_.assign(n * n, false);
    for (std::size_t i = 0; i < n; ++i) {
      int p = b_.node(i).parent;
      while (p >= 0) {
        ancestor_[static_cast<std::size_t>(p) * n + i] = true;
        p = b_.node(static_cast<std::size_t>(p)).parent;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int p = b_.node(i).parent;
      if (pool_.eligible[i] && p >= 0) {
        siblings_[static_cast<std::size_t>(p)].push_back(i);
      }
    }
  }

  std::vector<FailureReport> run() {
    std::vector<Hit> hits;
    const auto widths = b_.widths();
    signatures_.resize(widths.size());
    for (std::size_t wi = 0; wi < widths.size(); ++wi) classify_width(wi, hits);
    classify_wrapping(hits);

    std::vector<FailureReport> reports = merge_ranges(hits, b_.step());
    std::erase_if(reports, [&](const FailureReport& r) {
      // EP and EC need a clean wider layout to compare against, unless the
      // failure spans the whole sampled range.
      const bool needs_baseline = r.type == RlfType::kEP || r.type == RlfType::kEC;
      return needs_baseline && r.fail_max == b_.width_max() &&
             r.fail_min != b_.width_min();
    });

    const auto small = small_ranges();
    std::erase_if(reports, [&](const FailureReport& r) {
      for (const auto& [lo, hi] : small) {
        if (r.fail_min >= lo && r.fail_max <= hi) return true;
      }
      return false;
    });
    for (const auto& [lo, hi] : small) {
      FailureReport r;
      r.type = RlfType::kSR;
      r.fail_min = lo;
      r.fail_max = hi;
      r.id = failure_id(r.type, lo, hi, r.affected);
      reports.push_back(std::move(r));
    }
    sort_reports(reports);
    return reports;
  }

 private:
  bool related(std::size_t a, std::size_t b) const {
    const std::size_t n = b_.node_count();
    return ancestor_[a * n + b] || ancestor_[b * n + a];
  }

  const BBox& box(std::size_t wi, std::size_t node) const {
    return b_.entry(wi, node)->bbox;
  }

  void classify_width(std::size_t wi, std::vector<Hit>& hits) {
    const int width = b_.widths()[wi];
    const std::size_t n = b_.node_count();
    std::vector<bool> live(n, false);
    for (std::size_t i = 0; i < n; ++i) live[i] = pool_.eligible[i] && usable(b_, wi, i);
    auto& sig = signatures_[wi];

    // Viewport protrusion: horizontal bounds of the visible page only.
    const BBox viewport{0, 0, static_cast<double>(width), 0};
    std::vector<bool> vp(n, false);
    std::vector<Boundary> vp_side(n, Boundary::kNone);
    for (std::size_t i = 0; i < n; ++i) {
      if (!live[i]) continue;
      sig.push_back(relation(0, i, 0));
      const BBox& bb = box(wi, i);
      std::vector<Edge> edges;
      if (bb.x < viewport.x - opt_.eps) edges.push_back({Boundary::kLeft, -bb.x});
      if (bb.right() > viewport.right() + opt_.eps) {
        edges.push_back({Boundary::kRight, bb.right() - viewport.right()});
      }
      vp[i] = !edges.empty();
      vp_side[i] = deepest(edges);
    }
    const std::string body_xpath = b_.body() ? b_.node(*b_.body()).xpath() : std::string();
    for (std::size_t i = 0; i < n; ++i) {
      if (!vp[i]) continue;
      const int p = b_.node(i).parent;
      if (p >= 0 && vp[static_cast<std::size_t>(p)]) continue;  // topmost only
      std::vector<std::string> affected{b_.node(i).xpath()};
      if (!body_xpath.empty()) affected.push_back(body_xpath);
      hits.push_back({width, RlfType::kVP, std::move(affected), vp_side[i]});
    }

    // Element protrusion against the DOM parent.
    for (std::size_t i = 0; i < n; ++i) {
      const int p = b_.node(i).parent;
      if (!live[i] || p < 0 || !live[static_cast<std::size_t>(p)]) continue;
      const auto parent = static_cast<std::size_t>(p);
      const bool inside = contains(box(wi, parent), box(wi, i), opt_.eps);
      if (inside) sig.push_back(relation(1, parent, i));
      if (inside || vp[i]) continue;
      hits.push_back({width, RlfType::kEP, {b_.node(i).xpath(), b_.node(parent).xpath()},
                      deepest(violations(box(wi, parent), box(wi, i), opt_.eps))});
    }

    // Rows among siblings feed the relation map.
    for (const auto& [parent, kids] : siblings_) {
      for (std::size_t x = 0; x < kids.size(); ++x) {
        for (std::size_t y = x + 1; y < kids.size(); ++y) {
          const std::size_t a = kids[x];
          const std::size_t c = kids[y];
          if (live[a] && live[c] && shares_row(box(wi, a), box(wi, c), opt_.row_overlap)) {
            sig.push_back(relation(2, a, c));
          }
        }
      }
    }

    // Collisions: sweep by left edge.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (live[i]) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return std::tie(box(wi, a).x, a) < std::tie(box(wi, c).x, c);
    });
    std::set<std::pair<std::size_t, std::size_t>> overlapping;
    for (std::size_t x = 0; x < order.size(); ++x) {
      const BBox& a = box(wi, order[x]);
      for (std::size_t y = x + 1; y < order.size(); ++y) {
        const BBox& c = box(wi, order[y]);
        if (c.x >= a.right() - opt_.eps) break;
        if (related(order[x], order[y]) || !intersects(a, c, opt_.eps)) continue;
        overlapping.emplace(std::min(order[x], order[y]), std::max(order[x], order[y]));
      }
    }
    auto collides = [&](std::size_t a, std::size_t c) {
      return overlapping.count({std::min(a, c), std::max(a, c)}) > 0;
    };
    for (const auto& [a, c] : overlapping) {
      sig.push_back(relation(3, a, c));
      // Report a collision at the outermost pair of non-nested boxes.
      const int pa = b_.node(a).parent;
      const int pc = b_.node(c).parent;
      if (pa >= 0 && live[static_cast<std::size_t>(pa)] &&
          !related(static_cast<std::size_t>(pa), c) &&
          collides(static_cast<std::size_t>(pa), c)) {
        continue;
      }
      if (pc >= 0 && live[static_cast<std::size_t>(pc)] &&
          !related(a, static_cast<std::size_t>(pc)) &&
          collides(a, static_cast<std::size_t>(pc))) {
        continue;
      }
      hits.push_back({width, RlfType::kEC, {b_.node(a).xpath(), b_.node(c).xpath()},
                      Boundary::kNone});
    }
    std::sort(sig.begin(), sig.end());
  }

  // Wrapping needs to know whether two siblings shared a row at some wider
  // width, so widths are visited from widest to narrowest.
  void classify_wrapping(std::vector<Hit>& hits) {
    const auto widths = b_.widths();
    for (const auto& [parent, kids] : siblings_) {
      if (kids.size() < 3) continue;
      const std::size_t k = kids.size();
      std::vector<bool> seen_row(k * k, false);
      std::vector<bool> row(k * k, false);
      for (std::size_t step = widths.size(); step-- > 0;) {
        const std::size_t wi = step;
        std::vector<bool> live(k);
        for (std::size_t x = 0; x < k; ++x) live[x] = usable(b_, wi, kids[x]);
        for (std::size_t x = 0; x < k; ++x) {
          for (std::size_t y = 0; y < k; ++y) {
            row[x * k + y] = x != y && live[x] && live[y] &&
                             shares_row(box(wi, kids[x]), box(wi, kids[y]), opt_.row_overlap);
          }
        }
        for (std::size_t m = 0; m < k; ++m) {
          if (!live[m]) continue;
          const BBox& mb = box(wi, kids[m]);
          std::vector<std::size_t> stayers;
          for (std::size_t s = 0; s < k; ++s) {
            if (s == m || !live[s] || !seen_row[m * k + s]) continue;
            if (mb.y >= box(wi, kids[s]).bottom() - opt_.eps) stayers.push_back(s);
          }
          std::vector<std::string> members;
          for (std::size_t s : stayers) {
            const bool still_row = std::any_of(stayers.begin(), stayers.end(),
                                               [&](std::size_t t) { return row[s * k + t]; });
            if (still_row) members.push_back(b_.node(kids[s]).xpath());
          }
          if (members.size() < 2) continue;
          std::vector<std::string> affected{b_.node(kids[m]).xpath()};
          affected.insert(affected.end(), members.begin(), members.end());
          hits.push_back({widths[wi], RlfType::kWE, std::move(affected), Boundary::kNone});
        }
        for (std::size_t x = 0; x < k * k; ++x) {
          if (row[x]) seen_row[x] = true;
        }
      }
    }
  }

  // Windows whose relation map differs from both neighbours while the
  // neighbours agree with each other.
  std::vector<std::pair<int, int>> small_ranges() const {
    const auto widths = b_.widths();
    struct Segment {
      std::size_t first;
      std::size_t last;
    };
    std::vector<Segment> segments;
    for (std::size_t wi = 0; wi < widths.size(); ++wi) {
      if (!segments.empty() && signatures_[wi] == signatures_[segments.back().last]) {
        segments.back().last = wi;
      } else {
        segments.push_back({wi, wi});
      }
    }
    std::vector<std::pair<int, int>> out;
    for (std::size_t s = 1; s + 1 < segments.size(); ++s) {
      const auto& prev = signatures_[segments[s - 1].last];
      const auto& next = signatures_[segments[s + 1].first];
      if (prev != next) continue;
      const int lo = widths[segments[s].first];
      const int hi = widths[segments[s].last];
      if (hi - lo + b_.step() <= opt_.sr_max_span) out.emplace_back(lo, hi);
    }
    return out;
  }

  const CaptureBundle& b_;
  DetectOptions opt_;
  ElementPool pool_;
  std::vector<bool> ancestor_;
  std::map<std::size_t, std::vector<std::size_t>> siblings_;
  std::vector<std::vector<std::uint64_t>> signatures_;
};

}  // namespace

std::vector<FailureReport> detect(const CaptureBundle& bundle, const DetectOptions& options) {
  return Detector(bundle, options).run();
}

}  // namespace rlf::detection
