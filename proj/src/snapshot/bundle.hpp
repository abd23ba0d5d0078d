#pragma once

// Capture bundle: the serialized rendering record of one page (DOM tree,
// author stylesheets and per-viewport geometry) that every analysis stage
// consumes. A bundle is immutable once built.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rlf::snapshot {

// Border box in CSS px, page coordinates.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }

  bool operator==(const BBox&) const = default;
};

struct ComputedSubset {
  double font_size = 16;
  std::string display = "block";
  std::string position = "static";
  std::string float_value = "none";
  bool has_transition = false;
  bool has_transform = false;

  bool operator==(const ComputedSubset&) const = default;
};

struct Entry {
  BBox bbox;
  bool visible = true;
  ComputedSubset computed;

  bool operator==(const Entry&) const = default;
};

struct DomNode {
  std::string xpath;
  std::string tag;
  std::optional<std::string> id;
  std::vector<std::string> classes;
  std::map<std::string, std::string> attributes;
  std::string inline_style;
  std::vector<DomNode> children;

  bool operator==(const DomNode&) const = default;
};

struct ViewportRecord {
  int width = 0;
  std::map<std::string, Entry> entries;

  bool operator==(const ViewportRecord&) const = default;
};

struct Stylesheet {
  std::string origin;
  std::string text;
  // Cross-origin sheets the capture could not read. Their rules are unknown,
  // so nothing they set counts as developer-authored.
  bool opaque = false;

  bool operator==(const Stylesheet&) const = default;
};

// Failure-region image pair for the visibility check, paths relative to the
// bundle directory.
struct ScreenshotPair {
  std::string visible;
  std::string hidden;
  BBox region;

  bool operator==(const ScreenshotPair&) const = default;
};

// Plain serializable form of a bundle.
struct BundleData {
  std::string url;
  int height = 1000;
  int width_min = 320;
  int width_max = 1400;
  int step = 1;
  DomNode dom;
  std::vector<Stylesheet> stylesheets;
  std::vector<ViewportRecord> records;
  std::map<std::string, ScreenshotPair> screenshots;
  std::vector<std::string> warnings;

  bool operator==(const BundleData&) const = default;
};

// Flattened DOM node, indexed in document (pre-)order.
struct Node {
  const DomNode* dom = nullptr;
  int parent = -1;
  std::vector<std::size_t> children;
  int depth = 0;

  const std::string& xpath() const { return dom->xpath; }
  const std::string& tag() const { return dom->tag; }
};

struct Neighbors {
  std::string parent;
  std::vector<std::string> siblings;
  std::vector<std::string> children;
};

class CaptureBundle {
 public:
  // Validates every bundle invariant and builds the lookup indexes. Throws
  // rlf::Error (kSchema, kMissingViewport, kDuplicateXPath) on violation.
  static CaptureBundle from_data(BundleData data,
                                 std::filesystem::path root_dir = {});

  const BundleData& data() const { return state_->data; }
  const std::filesystem::path& root_dir() const { return state_->root_dir; }

  int width_min() const { return data().width_min; }
  int width_max() const { return data().width_max; }
  int step() const { return data().step; }
  int height() const { return data().height; }
  std::span<const int> widths() const { return state_->widths; }

  std::size_t node_count() const { return state_->nodes.size(); }
  const Node& node(std::size_t index) const { return state_->nodes[index]; }
  std::optional<std::size_t> find(std::string_view xpath) const;
  // Throws kUnknownXPath.
  std::size_t require(std::string_view xpath) const;
  std::optional<std::size_t> body() const { return state_->body; }
  std::size_t root() const { return 0; }

  std::optional<std::size_t> width_index(int width) const;
  // Throws kUnsampledWidth.
  std::size_t require_width(int width) const;

  // Entry for a node at a sampled width, or nullptr when not recorded.
  const Entry* entry(std::size_t width_index, std::size_t node) const {
    const auto& slot =
        state_->entries[width_index * state_->nodes.size() + node];
    return slot ? &*slot : nullptr;
  }

  BBox element_box(std::string_view xpath, int width) const;
  Neighbors tree_neighbors(std::string_view xpath) const;

  // True when `ancestor` is a proper ancestor of `node`.
  bool is_ancestor(std::size_t ancestor, std::size_t node) const;

  // Same page with records limited to [lo, hi]; the declared range shrinks to
  // the sampled widths inside it.
  CaptureBundle restricted(int lo, int hi) const;

 private:
  struct State {
    BundleData data;
    std::filesystem::path root_dir;
    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> by_xpath;
    std::optional<std::size_t> body;
    std::vector<int> widths;
    // widths.size() x nodes.size(), row-major by width.
    std::vector<std::optional<Entry>> entries;
  };

  explicit CaptureBundle(std::shared_ptr<const State> state)
      : state_(std::move(state)) {}

  // Shared so copies are cheap; Node::dom points into state_->data.
  std::shared_ptr<const State> state_;
};

// Bundle directory layout: manifest.json, dom.json, stylesheets.json,
// viewports.jsonl and an images/ directory. See docs/bundle_format.md.
CaptureBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const BundleData& data, const std::filesystem::path& dir);

// Parses the four bundle documents without touching the filesystem.
BundleData parse_bundle_documents(std::string_view manifest,
                                  std::string_view dom,
                                  std::string_view stylesheets,
                                  std::string_view viewports_jsonl);

}  // namespace rlf::snapshot
