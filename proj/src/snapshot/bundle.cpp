#include "snapshot/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/error.hpp"

namespace rlf::snapshot {
namespace {

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::kSchema, message);
}

void check_box(const BBox& box, const std::string& where) {
  if (!std::isfinite(box.x) || !std::isfinite(box.y) || !std::isfinite(box.w) ||
      !std::isfinite(box.h)) {
    schema_error("non-finite bbox for " + where);
  }
  if (box.w < 0 || box.h < 0) schema_error("negative bbox extent for " + where);
}

void flatten(const DomNode& dom, int parent, int depth, std::vector<Node>& out) {
  const std::size_t index = out.size();
  out.push_back(Node{&dom, parent, {}, depth});
  if (parent >= 0) out[static_cast<std::size_t>(parent)].children.push_back(index);
  for (const auto& child : dom.children) {
    if (child.xpath.size() <= dom.xpath.size() + 1 ||
        child.xpath.compare(0, dom.xpath.size() + 1, dom.xpath + "/") != 0) {
      schema_error("child xpath '" + child.xpath +
                   "' does not extend parent xpath '" + dom.xpath + "'");
    }
    flatten(child, static_cast<int>(index), depth + 1, out);
  }
}

}  // namespace

CaptureBundle CaptureBundle::from_data(BundleData data,
                                       std::filesystem::path root_dir) {
  if (data.step < 1) schema_error("step must be >= 1");
  if (data.width_min > data.width_max) schema_error("width_min > width_max");
  if (data.height <= 0) schema_error("height must be positive");
  if (data.dom.tag != "html") schema_error("root node tag must be 'html'");

  auto state = std::make_shared<State>();
  state->data = std::move(data);
  state->root_dir = std::move(root_dir);
  const BundleData& d = state->data;

  flatten(d.dom, -1, 0, state->nodes);
  for (std::size_t i = 0; i < state->nodes.size(); ++i) {
    const auto& xpath = state->nodes[i].xpath();
    if (!state->by_xpath.emplace(xpath, i).second) {
      throw Error(ErrorCode::kDuplicateXPath, "duplicate xpath '" + xpath + "'");
    }
    if (!state->body && state->nodes[i].tag() == "body" &&
        state->nodes[i].parent == 0) {
      state->body = i;
    }
  }

  for (int w = d.width_min; w <= d.width_max; w += d.step) {
    state->widths.push_back(w);
  }

  const std::size_t n = state->nodes.size();
  state->entries.assign(state->widths.size() * n, std::nullopt);
  std::vector<bool> seen(state->widths.size(), false);
  for (const auto& record : d.records) {
    if (record.width < d.width_min || record.width > d.width_max ||
        (record.width - d.width_min) % d.step != 0) {
      schema_error("record width " + std::to_string(record.width) +
                   " is not a sampled width of the declared range");
    }
    const auto wi =
        static_cast<std::size_t>((record.width - d.width_min) / d.step);
    if (seen[wi]) {
      schema_error("duplicate record for width " + std::to_string(record.width));
    }
    seen[wi] = true;
    for (const auto& [xpath, entry] : record.entries) {
      auto it = state->by_xpath.find(xpath);
      if (it == state->by_xpath.end()) {
        schema_error("record for width " + std::to_string(record.width) +
                     " references unknown xpath '" + xpath + "'");
      }
      check_box(entry.bbox, xpath);
      if (!(entry.computed.font_size > 0)) {
        schema_error("font_size must be positive for " + xpath);
      }
      state->entries[wi * n + it->second] = entry;
    }
  }
  for (std::size_t wi = 0; wi < seen.size(); ++wi) {
    if (!seen[wi]) {
      throw Error(ErrorCode::kMissingViewport,
                  "no record for sampled width " +
                      std::to_string(state->widths[wi]));
    }
  }
  return CaptureBundle(std::move(state));
}

std::optional<std::size_t> CaptureBundle::find(std::string_view xpath) const {
  auto it = state_->by_xpath.find(std::string(xpath));
  if (it == state_->by_xpath.end()) return std::nullopt;
  return it->second;
}

std::size_t CaptureBundle::require(std::string_view xpath) const {
  if (auto index = find(xpath)) return *index;
  throw Error(ErrorCode::kUnknownXPath,
              "unknown xpath '" + std::string(xpath) + "'");
}

std::optional<std::size_t> CaptureBundle::width_index(int width) const {
  const auto& d = data();
  if (width < d.width_min || width > d.width_max ||
      (width - d.width_min) % d.step != 0) {
    return std::nullopt;
  }
  return static_cast<std::size_t>((width - d.width_min) / d.step);
}

std::size_t CaptureBundle::require_width(int width) const {
  if (auto wi = width_index(width)) return *wi;
  throw Error(ErrorCode::kUnsampledWidth,
              "width " + std::to_string(width) + " is not sampled");
}

BBox CaptureBundle::element_box(std::string_view xpath, int width) const {
  const std::size_t node = require(xpath);
  const std::size_t wi = require_width(width);
  const Entry* e = entry(wi, node);
  if (e == nullptr) {
    throw Error(ErrorCode::kUnknownXPath,
                "no geometry for '" + std::string(xpath) + "' at width " +
                    std::to_string(width));
  }
  return e->bbox;
}

Neighbors CaptureBundle::tree_neighbors(std::string_view xpath) const {
  const Node& n = node(require(xpath));
  Neighbors out;
  if (n.parent >= 0) {
    const Node& parent = node(static_cast<std::size_t>(n.parent));
    out.parent = parent.xpath();
    for (std::size_t sibling : parent.children) {
      if (node(sibling).dom != n.dom) out.siblings.push_back(node(sibling).xpath());
    }
  }
  for (std::size_t child : n.children) out.children.push_back(node(child).xpath());
  return out;
}

bool CaptureBundle::is_ancestor(std::size_t ancestor, std::size_t index) const {
  int p = node(index).parent;
  while (p >= 0) {
    if (static_cast<std::size_t>(p) == ancestor) return true;
    p = node(static_cast<std::size_t>(p)).parent;
  }
  return false;
}

CaptureBundle CaptureBundle::restricted(int lo, int hi) const {
  BundleData copy = data();
  std::vector<ViewportRecord> kept;
  for (auto& record : copy.records) {
    if (record.width >= lo && record.width <= hi) kept.push_back(std::move(record));
  }
  if (kept.empty()) {
    throw Error(ErrorCode::kUnsampledWidth,
                "no sampled width inside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.width < b.width; });
  copy.width_min = kept.front().width;
  copy.width_max = kept.back().width;
  copy.records = std::move(kept);
  return from_data(std::move(copy), root_dir());
}

}  // namespace rlf::snapshot
