#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "snapshot/bundle.hpp"

namespace rlf::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RLF_FIXTURES) / "bundles" / name;
}

inline std::filesystem::path fixture_root() { return std::filesystem::path(RLF_FIXTURES); }

// Scratch directory under the system temp dir, emptied on construction and
// removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("rlf-test-" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Hand-built pages: html > head, body > ... with geometry supplied per width.
// Nodes missing from the layout map are recorded as invisible.
class PageBuilder {
 public:
  using Layout = std::function<void(int width, std::map<std::string, snapshot::BBox>&)>;

  PageBuilder(int width_min, int width_max, int step = 1) {
    data_.url = "test://page";
    data_.width_min = width_min;
    data_.width_max = width_max;
    data_.step = step;
    data_.dom.xpath = "/html[1]";
    data_.dom.tag = "html";
    data_.dom.children.push_back(make("/html[1]/head[1]", "head"));
    data_.dom.children.push_back(make("/html[1]/body[1]", "body"));
  }

  static constexpr const char* kBody = "/html[1]/body[1]";

  std::string add(const std::string& parent, const std::string& tag,
                  std::vector<std::string> classes = {}, std::string style = {}) {
    snapshot::DomNode* p = find(data_.dom, parent);
    int index = 1;
    for (const auto& c : p->children) index += c.tag == tag;
    auto node = make(parent + "/" + tag + "[" + std::to_string(index) + "]", tag);
    node.classes = std::move(classes);
    node.inline_style = std::move(style);
    p->children.push_back(node);
    return node.xpath;
  }

  snapshot::DomNode& node(const std::string& xpath) { return *find(data_.dom, xpath); }

  void css(std::string text, bool opaque = false) {
    data_.stylesheets.push_back({"test://sheet" + std::to_string(data_.stylesheets.size()),
                                 std::move(text), opaque});
  }

  void layout(Layout fn) { layout_ = std::move(fn); }

  // Computed values applied to a node at every width.
  void computed(const std::string& xpath, snapshot::ComputedSubset c) { computed_[xpath] = c; }

  snapshot::BundleData data() const {
    snapshot::BundleData d = data_;
    for (int w = d.width_min; w <= d.width_max; w += d.step) {
      std::map<std::string, snapshot::BBox> boxes;
      boxes["/html[1]"] = {0, 0, double(w), 1000};
      boxes[kBody] = {0, 0, double(w), 1000};
      if (layout_) layout_(w, boxes);
      snapshot::ViewportRecord r;
      r.width = w;
      visit(d.dom, [&](const snapshot::DomNode& n) {
        snapshot::Entry e;
        if (auto it = computed_.find(n.xpath); it != computed_.end()) e.computed = it->second;
        if (auto it = boxes.find(n.xpath); it != boxes.end()) {
          e.bbox = it->second;
        } else {
          e.visible = false;
          e.computed.display = "none";
        }
        r.entries[n.xpath] = e;
      });
      d.records.push_back(std::move(r));
    }
    return d;
  }

  snapshot::CaptureBundle build() const { return snapshot::CaptureBundle::from_data(data()); }

 private:
  static snapshot::DomNode make(std::string xpath, std::string tag) {
    snapshot::DomNode n;
    n.xpath = std::move(xpath);
    n.tag = std::move(tag);
    return n;
  }

  static snapshot::DomNode* find(snapshot::DomNode& n, const std::string& xpath) {
    if (n.xpath == xpath) return &n;
    for (auto& c : n.children) {
      if (auto* hit = find(c, xpath)) return hit;
    }
    return nullptr;
  }

  static void visit(const snapshot::DomNode& n,
                    const std::function<void(const snapshot::DomNode&)>& fn) {
    fn(n);
    for (const auto& c : n.children) visit(c, fn);
  }

  snapshot::BundleData data_;
  Layout layout_;
  std::map<std::string, snapshot::ComputedSubset> computed_;
};

}  // namespace rlf::test
