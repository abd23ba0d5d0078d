#include <cmath>
#include <sstream>

#include "common/error.hpp"
#include "common/text_file.hpp"
#include "json.hpp"
#include "snapshot/bundle.hpp"

namespace rlf::snapshot {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kManifest = "manifest.json";
constexpr const char* kDom = "dom.json";
constexpr const char* kStylesheets = "stylesheets.json";
constexpr const char* kViewports = "viewports.jsonl";

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::kSchema, message);
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    schema_error(std::string(what) + ": " + e.what());
  }
}

void check_version(const json& doc, const char* what) {
  if (!doc.is_object()) schema_error(std::string(what) + ": expected an object");
  auto it = doc.find("schema_version");
  if (it == doc.end() || !it->is_number_integer() ||
      it->get<int>() != kSchemaVersion) {
    schema_error(std::string(what) + ": unsupported or missing schema_version");
  }
}

// Geometry is stored with two fractional digits.
double round2(double v) { return std::round(v * 100.0) / 100.0; }

json box_to_json(const BBox& b) {
  return json::array({round2(b.x), round2(b.y), round2(b.w), round2(b.h)});
}

BBox box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) schema_error("bbox must be [x, y, w, h]");
  for (const auto& v : j) {
    if (!v.is_number()) schema_error("bbox components must be numbers");
  }
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
              j[3].get<double>()};
}

json node_to_json(const DomNode& n) {
  json j;
  j["xpath"] = n.xpath;
  j["tag"] = n.tag;
  if (n.id) j["id"] = *n.id;
  j["classes"] = n.classes;
  j["attributes"] = n.attributes;
  j["style"] = n.inline_style;
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  return j;
}

DomNode node_from_json(const json& j) {
  try {
    DomNode n;
    n.xpath = j.at("xpath").get<std::string>();
    n.tag = j.at("tag").get<std::string>();
    if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
      n.id = it->get<std::string>();
    }
    if (auto it = j.find("classes"); it != j.end()) {
      n.classes = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("attributes"); it != j.end()) {
      n.attributes = it->get<std::map<std::string, std::string>>();
    }
    if (auto it = j.find("style"); it != j.end()) {
      n.inline_style = it->get<std::string>();
    }
    if (auto it = j.find("children"); it != j.end()) {
      if (!it->is_array()) schema_error("children must be an array");
      for (const auto& c : *it) n.children.push_back(node_from_json(c));
    }
    return n;
  } catch (const json::exception& e) {
    schema_error(std::string("dom node: ") + e.what());
  }
}

json entry_to_json(const Entry& e) {
  return json{{"bbox", box_to_json(e.bbox)},
              {"visible", e.visible},
              {"computed",
               {{"font_size", round2(e.computed.font_size)},
                {"display", e.computed.display},
                {"position", e.computed.position},
                {"float", e.computed.float_value},
                {"has_transition", e.computed.has_transition},
                {"has_transform", e.computed.has_transform}}}};
}

Entry entry_from_json(const json& j) {
  try {
    Entry e;
    e.bbox = box_from_json(j.at("bbox"));
    e.visible = j.at("visible").get<bool>();
    const json& c = j.at("computed");
    e.computed.font_size = c.at("font_size").get<double>();
    e.computed.display = c.at("display").get<std::string>();
    e.computed.position = c.at("position").get<std::string>();
    e.computed.float_value = c.at("float").get<std::string>();
    e.computed.has_transition = c.at("has_transition").get<bool>();
    e.computed.has_transform = c.at("has_transform").get<bool>();
    return e;
  } catch (const json::exception& e) {
    schema_error(std::string("viewport entry: ") + e.what());
  }
}

}  // namespace

BundleData parse_bundle_documents(std::string_view manifest_text,
                                  std::string_view dom_text,
                                  std::string_view stylesheets_text,
                                  std::string_view viewports_jsonl) {
  BundleData d;
  const json manifest = parse_json(manifest_text, kManifest);
  check_version(manifest, kManifest);
  try {
    d.url = manifest.at("url").get<std::string>();
    d.height = manifest.at("height").get<int>();
    d.width_min = manifest.at("width_min").get<int>();
    d.width_max = manifest.at("width_max").get<int>();
    d.step = manifest.at("step").get<int>();
    if (auto it = manifest.find("screenshots"); it != manifest.end()) {
      for (const auto& [id, pair] : it->items()) {
        d.screenshots[id] = ScreenshotPair{pair.at("visible").get<std::string>(),
                                           pair.at("hidden").get<std::string>(),
                                           box_from_json(pair.at("region"))};
      }
    }
    if (auto it = manifest.find("warnings"); it != manifest.end()) {
      d.warnings = it->get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    schema_error(std::string(kManifest) + ": " + e.what());
  }

  const json dom = parse_json(dom_text, kDom);
  check_version(dom, kDom);
  if (!dom.contains("root")) schema_error("dom.json: missing root");
  d.dom = node_from_json(dom["root"]);

  const json sheets = parse_json(stylesheets_text, kStylesheets);
  check_version(sheets, kStylesheets);
  try {
    for (const auto& s : sheets.at("sheets")) {
      d.stylesheets.push_back(Stylesheet{s.at("origin").get<std::string>(),
                                         s.at("text").get<std::string>(),
                                         s.value("opaque", false)});
    }
  } catch (const json::exception& e) {
    schema_error(std::string(kStylesheets) + ": " + e.what());
  }

  std::istringstream lines{std::string(viewports_jsonl)};
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json rec = parse_json(line, kViewports);
    try {
      ViewportRecord r;
      r.width = rec.at("width").get<int>();
      for (const auto& [xpath, e] : rec.at("entries").items()) {
        r.entries.emplace(xpath, entry_from_json(e));
      }
      d.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      schema_error(std::string(kViewports) + " line " + std::to_string(line_no) +
                   ": " + e.what());
    }
  }
  return d;
}

CaptureBundle load_bundle(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / kManifest)) {
    throw Error(ErrorCode::kIo, "no bundle manifest in " + dir.string());
  }
  BundleData d = parse_bundle_documents(
      read_text_file(dir / kManifest), read_text_file(dir / kDom),
      read_text_file(dir / kStylesheets), read_text_file(dir / kViewports));
  return CaptureBundle::from_data(std::move(d), dir);
}

void save_bundle(const BundleData& d, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string());

  json manifest{{"schema_version", kSchemaVersion},
                {"url", d.url},
                {"height", d.height},
                {"width_min", d.width_min},
                {"width_max", d.width_max},
                {"step", d.step},
                {"warnings", d.warnings}};
  json shots = json::object();
  for (const auto& [id, pair] : d.screenshots) {
    shots[id] = {{"visible", pair.visible},
                 {"hidden", pair.hidden},
                 {"region", box_to_json(pair.region)}};
  }
  manifest["screenshots"] = shots;
  write_text_file(dir / kManifest, manifest.dump(2) + "\n");

  json dom{{"schema_version", kSchemaVersion}, {"root", node_to_json(d.dom)}};
  write_text_file(dir / kDom, dom.dump(2) + "\n");

  json sheets{{"schema_version", kSchemaVersion}, {"sheets", json::array()}};
  for (const auto& s : d.stylesheets) {
    sheets["sheets"].push_back(
        {{"origin", s.origin}, {"text", s.text}, {"opaque", s.opaque}});
  }
  write_text_file(dir / kStylesheets, sheets.dump(2) + "\n");

  std::string stream;
  for (const auto& r : d.records) {
    json entries = json::object();
    for (const auto& [xpath, e] : r.entries) entries[xpath] = entry_to_json(e);
    stream += json{{"width", r.width}, {"entries", entries}}.dump();
    stream += '\n';
  }
  write_text_file(dir / kViewports, stream);
}

}  // namespace rlf::snapshot
