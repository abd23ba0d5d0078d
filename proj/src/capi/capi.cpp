#include "rlf/rlf.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "common/error.hpp"
#include "css/cascade.hpp"
#include "detection/detect.hpp"
#include "io/bridge.hpp"
#include "io/documents.hpp"
#include "json.hpp"
#include "metrics/metrics.hpp"
#include "metrics/oracle.hpp"
#include "noi/noi.hpp"
#include "pipeline/pipeline.hpp"
#include "snapshot/bundle.hpp"

struct rlf_bundle {
  rlf::snapshot::CaptureBundle bundle;
};

struct rlf_failures {
  rlf::io::FailuresDocument doc;
};

struct rlf_ranked {
  rlf::pipeline::PageLocalization page;
};

namespace {

thread_local std::string g_last_error;

rlf_status to_status(rlf::ErrorCode code) {
  using rlf::ErrorCode;
  switch (code) {
    case ErrorCode::kSchema:
      return RLF_ERR_SCHEMA;
    case ErrorCode::kMissingViewport:
      return RLF_ERR_MISSING_VIEWPORT;
    case ErrorCode::kDuplicateXPath:
      return RLF_ERR_DUPLICATE_XPATH;
    case ErrorCode::kUnknownXPath:
      return RLF_ERR_UNKNOWN_XPATH;
    case ErrorCode::kUnsampledWidth:
      return RLF_ERR_UNSAMPLED_WIDTH;
    case ErrorCode::kDimensionMismatch:
      return RLF_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kEmptyCandidateSet:
      return RLF_ERR_EMPTY_CANDIDATE_SET;
    case ErrorCode::kCaptureUnavailable:
      return RLF_ERR_CAPTURE_UNAVAILABLE;
    case ErrorCode::kNavigationFailure:
      return RLF_ERR_NAVIGATION_FAILURE;
    case ErrorCode::kIo:
      return RLF_ERR_IO;
    case ErrorCode::kInvalidArgument:
      return RLF_ERR_INVALID_ARGUMENT;
  }
  return RLF_ERR_INTERNAL;
}

template <typename F>
rlf_status guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RLF_OK;
  } catch (const rlf::Error& e) {
    g_last_error = std::string(rlf::error_code_name(e.code())) + ": " + e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return RLF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return RLF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw rlf::Error(rlf::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rlf::detection::DetectOptions detect_options(const rlf_detect_options* o) {
  rlf::detection::DetectOptions out;
  if (o) {
    out.eps = o->eps;
    out.sr_max_span = o->sr_max_span;
    out.row_overlap = o->row_overlap;
  }
  if (!(out.eps >= 0)) throw rlf::Error(rlf::ErrorCode::kInvalidArgument, "eps must be >= 0");
  if (out.sr_max_span < 1) {
    throw rlf::Error(rlf::ErrorCode::kInvalidArgument, "sr_max_span must be >= 1");
  }
  if (!(out.row_overlap > 0 && out.row_overlap <= 1)) {
    throw rlf::Error(rlf::ErrorCode::kInvalidArgument, "row_overlap must be in (0, 1]");
  }
  return out;
}

rlf::noi::NoiOptions noi_options(const rlf_noi_options* o) {
  rlf::noi::NoiOptions out;
  if (o) {
    out.channel_threshold = o->channel_threshold;
    out.min_diff_pixels = o->min_diff_pixels;
  }
  return out;
}

const rlf::detection::FailureReport& find_failure(const rlf_failures* failures,
                                                  const char* id) {
  for (const auto& f : failures->doc.failures) {
    if (f.id == id) return f;
  }
  throw rlf::Error(rlf::ErrorCode::kInvalidArgument, std::string("unknown failure id ") + id);
}

std::string oracle_json(const rlf::metrics::OracleResult& r) {
  return nlohmann::json{{"verdict", rlf::metrics::to_string(r.verdict)},
                        {"original_present", r.original_present},
                        {"new_failures", r.new_failures}}
             .dump(2) +
         "\n";
}

rlf::io::BridgeCommand bridge_command(const char* text) {
  if (!text) return rlf::io::default_bridge_command();
  rlf::io::BridgeCommand cmd;
  std::istringstream in(text);
  std::string part;
  while (in >> part) cmd.argv.push_back(part);
  return cmd;
}

}  // namespace

extern "C" {

const char* rlf_version(void) { return "0.1.0"; }

const char* rlf_last_error(void) { return g_last_error.c_str(); }

const char* rlf_status_name(rlf_status status) {
  switch (status) {
    case RLF_OK:
      return "OK";
    case RLF_ERR_SCHEMA:
      return "SchemaError";
    case RLF_ERR_MISSING_VIEWPORT:
      return "MissingViewport";
    case RLF_ERR_DUPLICATE_XPATH:
      return "DuplicateXPath";
    case RLF_ERR_UNKNOWN_XPATH:
      return "UnknownXPath";
    case RLF_ERR_UNSAMPLED_WIDTH:
      return "UnsampledWidth";
    case RLF_ERR_DIMENSION_MISMATCH:
      return "DimensionMismatch";
    case RLF_ERR_EMPTY_CANDIDATE_SET:
      return "EmptyCandidateSet";
    case RLF_ERR_CAPTURE_UNAVAILABLE:
      return "CaptureUnavailable";
    case RLF_ERR_NAVIGATION_FAILURE:
      return "NavigationFailure";
    case RLF_ERR_IO:
      return "IoError";
    case RLF_ERR_INVALID_ARGUMENT:
      return "InvalidArgument";
    case RLF_ERR_INTERNAL:
      return "InternalError";
  }
  return "Unknown";
}

int rlf_status_exit_code(rlf_status status) {
  switch (status) {
    case RLF_OK:
      return 0;
    case RLF_ERR_CAPTURE_UNAVAILABLE:
    case RLF_ERR_INTERNAL:
      return 2;
    default:
      return 1;
  }
}

void rlf_string_free(char* text) { std::free(text); }

rlf_status rlf_bundle_load(const char* dir, rlf_bundle** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = nullptr;
    *out = new rlf_bundle{rlf::snapshot::load_bundle(dir)};
  });
}

void rlf_bundle_free(rlf_bundle* bundle) { delete bundle; }

rlf_status rlf_bundle_info(const rlf_bundle* bundle, char** json_out) {
  return guard([&] {
    require(bundle, "bundle");
    require(json_out, "json_out");
    const auto& b = bundle->bundle;
    nlohmann::json j{{"url", b.data().url},
                     {"width_min", b.width_min()},
                     {"width_max", b.width_max()},
                     {"step", b.step()},
                     {"height", b.height()},
                     {"records", b.widths().size()},
                     {"elements", b.node_count()},
                     {"warnings", b.data().warnings}};
    *json_out = copy_out(j.dump(2) + "\n");
  });
}

rlf_status rlf_bundle_element_box(const rlf_bundle* bundle, const char* xpath, int width,
                                  double box[4]) {
  return guard([&] {
    require(bundle, "bundle");
    require(xpath, "xpath");
    require(box, "box");
    const auto b = bundle->bundle.element_box(xpath, width);
    box[0] = b.x;
    box[1] = b.y;
    box[2] = b.w;
    box[3] = b.h;
  });
}

void rlf_detect_options_default(rlf_detect_options* options) {
  if (!options) return;
  const rlf::detection::DetectOptions d;
  options->eps = d.eps;
  options->sr_max_span = d.sr_max_span;
  options->row_overlap = d.row_overlap;
}

rlf_status rlf_detect(const rlf_bundle* bundle, const rlf_detect_options* options,
                      rlf_failures** out) {
  return guard([&] {
    require(bundle, "bundle");
    require(out, "out");
    *out = nullptr;
    const auto& b = bundle->bundle;
    rlf::io::FailuresDocument doc{b.data().url, b.width_min(), b.width_max(), b.step(),
                                  rlf::detection::detect(b, detect_options(options))};
    *out = new rlf_failures{std::move(doc)};
  });
}

rlf_status rlf_failures_from_json(const char* json, rlf_failures** out) {
  return guard([&] {
    require(json, "json");
    require(out, "out");
    *out = nullptr;
    *out = new rlf_failures{rlf::io::failures_from_json(json)};
  });
}

rlf_status rlf_failures_to_json(const rlf_failures* failures, char** json_out) {
  return guard([&] {
    require(failures, "failures");
    require(json_out, "json_out");
    *json_out = copy_out(rlf::io::failures_to_json(failures->doc));
  });
}

size_t rlf_failures_count(const rlf_failures* failures) {
  return failures ? failures->doc.failures.size() : 0;
}

void rlf_failures_free(rlf_failures* failures) { delete failures; }

void rlf_noi_options_default(rlf_noi_options* options) {
  if (!options) return;
  const rlf::noi::NoiOptions d;
  options->channel_threshold = d.channel_threshold;
  options->min_diff_pixels = d.min_diff_pixels;
}

rlf_status rlf_noi_annotate(const rlf_bundle* bundle, rlf_failures* failures,
                            const rlf_noi_options* options) {
  return guard([&] {
    require(bundle, "bundle");
    require(failures, "failures");
    failures->doc.failures =
        rlf::noi::annotate(bundle->bundle, failures->doc.failures, noi_options(options));
  });
}

rlf_status rlf_noi_classify_png(const char* visible_png, const char* hidden_png,
                                const double region[4], const rlf_noi_options* options,
                                int* observable, long* differing_pixels) {
  return guard([&] {
    require(visible_png, "visible_png");
    require(hidden_png, "hidden_png");
    require(region, "region");
    rlf::noi::RegionPair pair{rlf::noi::read_png(visible_png), rlf::noi::read_png(hidden_png),
                              {region[0], region[1], region[2], region[3]}, ""};
    const auto r = rlf::noi::classify_noi(pair, noi_options(options));
    if (observable) {
      *observable = r.observability == rlf::detection::Observability::kObservable ? 1 : 0;
    }
    if (differing_pixels) *differing_pixels = r.differing_pixels;
  });
}

void rlf_localize_options_default(rlf_localize_options* options) {
  if (!options) return;
  const rlf::localization::NeighborOptions d;
  options->hops = d.hops;
  options->eps = d.eps;
  options->numeric_first = 0;
}

rlf_status rlf_localize(const rlf_bundle* bundle, const rlf_failures* failures,
                        const rlf_localize_options* options, rlf_ranked** out) {
  return guard([&] {
    require(bundle, "bundle");
    require(failures, "failures");
    require(out, "out");
    *out = nullptr;
    rlf::pipeline::LocalizeOptions o;
    if (options) {
      o.neighbor.hops = options->hops;
      o.neighbor.eps = options->eps;
      o.rank.numeric_first = options->numeric_first != 0;
    }
    const rlf::css::Cascade cascade(bundle->bundle);
    *out = new rlf_ranked{rlf::pipeline::localize_page(cascade, failures->doc.failures, o)};
  });
}

rlf_status rlf_ranked_to_json(const rlf_ranked* ranked, char** json_out) {
  return guard([&] {
    require(ranked, "ranked");
    require(json_out, "json_out");
    *json_out = copy_out(rlf::io::ranked_to_json(ranked->page));
  });
}

rlf_status rlf_candidates_to_json(const rlf_ranked* ranked, char** json_out) {
  return guard([&] {
    require(ranked, "ranked");
    require(json_out, "json_out");
    *json_out = copy_out(rlf::io::candidates_to_json(ranked->page));
  });
}

void rlf_ranked_free(rlf_ranked* ranked) { delete ranked; }

rlf_status rlf_render_report(const char* document_json, char** text_out) {
  return guard([&] {
    require(document_json, "document_json");
    require(text_out, "text_out");
    const std::string kind = rlf::io::document_kind(document_json);
    std::string text;
    if (kind == "metrics") {
      text = rlf::metrics::render_metrics(rlf::io::metrics_from_json(document_json));
    } else if (kind == "ranked") {
      const auto page = rlf::io::ranked_from_json(document_json);
      text = "page " + page.page + "\n";
      for (const auto& f : page.failures) {
        text += std::string(rlf::detection::to_string(f.failure.type)) + " " +
                std::to_string(f.failure.fail_min) + ".." + std::to_string(f.failure.fail_max) +
                " (" + rlf::detection::to_string(f.failure.observability) + ")\n";
        rlf::prioritization::RankedList list;
        list.failure_id = f.failure.id;
        if (f.ranked) list = *f.ranked;
        text += rlf::prioritization::render_report(list);
      }
      if (page.failures.empty()) text += "no failures\n";
    } else {
      throw rlf::Error(rlf::ErrorCode::kSchema, "expected a ranked or metrics document");
    }
    *text_out = copy_out(text);
  });
}

void rlf_evaluate_options_default(rlf_evaluate_options* options) {
  if (!options) return;
  const rlf::metrics::EvaluateOptions d;
  options->exclude_np = d.exclude_np;
  options->exclude_we_np = d.exclude_we_np;
  options->k = d.k;
}

rlf_status rlf_evaluate(const char* const* ranked_json, size_t page_count,
                        const char* truth_json, const rlf_evaluate_options* options,
                        char** metrics_json_out) {
  return guard([&] {
    require(truth_json, "truth_json");
    require(metrics_json_out, "metrics_json_out");
    if (page_count > 0) require(ranked_json, "ranked_json");
    std::vector<rlf::metrics::PageOutcome> pages;
    for (size_t i = 0; i < page_count; ++i) {
      require(ranked_json[i], "ranked_json[i]");
      pages.push_back(rlf::io::ranked_from_json(ranked_json[i]));
    }
    rlf::metrics::EvaluateOptions o;
    if (options) {
      o.exclude_np = options->exclude_np != 0;
      o.exclude_we_np = options->exclude_we_np != 0;
      o.k = options->k;
    }
    const auto report =
        rlf::metrics::evaluate(pages, rlf::io::truth_from_json(truth_json), o);
    *metrics_json_out = copy_out(rlf::io::metrics_to_json(report));
  });
}

rlf_status rlf_verify_recorded(const rlf_bundle* bundle, const rlf_failures* failures,
                               const char* failure_id, const char* xpath, const char* property,
                               const char* strategy, const char* mutations_index,
                               const rlf_detect_options* options, char** result_json) {
  return guard([&] {
    require(bundle, "bundle");
    require(failures, "failures");
    require(failure_id, "failure_id");
    require(xpath, "xpath");
    require(property, "property");
    require(mutations_index, "mutations_index");
    require(result_json, "result_json");
    rlf::metrics::RecordedRecapturer recapturer(mutations_index);
    const rlf::metrics::Mutation m{
        xpath, property, rlf::metrics::Neutralization::parse(strategy ? strategy : "delete")};
    const auto r = rlf::metrics::oracle_verify(bundle->bundle, find_failure(failures, failure_id),
                                               m, recapturer, detect_options(options));
    *result_json = copy_out(oracle_json(r));
  });
}

void rlf_capture_config_default(rlf_capture_config* config) {
  if (!config) return;
  const rlf::io::CaptureConfig d;
  config->width_min = d.width_min;
  config->width_max = d.width_max;
  config->step = d.step;
  config->height = d.height;
  config->timeout_ms = d.timeout_ms;
}

rlf_status rlf_capture(const char* bridge_command_text, const char* target,
                       const char* out_dir, const rlf_capture_config* config) {
  return guard([&] {
    require(target, "target");
    require(out_dir, "out_dir");
    rlf::io::CaptureJob job;
    job.target = target;
    job.out_dir = out_dir;
    if (config) {
      job.config = {config->width_min, config->width_max, config->step, config->height,
                    config->timeout_ms};
    }
    rlf::io::validate(job.config);
    rlf::io::run_capture(bridge_command(bridge_command_text), job);
  });
}

rlf_status rlf_verify_bridge(const rlf_bundle* bundle, const rlf_failures* failures,
                             const char* failure_id, const char* xpath, const char* property,
                             const char* strategy, const char* bridge_command_text,
                             const char* target, const char* work_dir,
                             const rlf_detect_options* options, char** result_json) {
  return guard([&] {
    require(bundle, "bundle");
    require(failures, "failures");
    require(failure_id, "failure_id");
    require(xpath, "xpath");
    require(property, "property");
    require(target, "target");
    require(work_dir, "work_dir");
    require(result_json, "result_json");
    rlf::metrics::BridgeRecapturer recapturer(bridge_command(bridge_command_text), target,
                                              work_dir, bundle->bundle.height());
    const rlf::metrics::Mutation m{
        xpath, property, rlf::metrics::Neutralization::parse(strategy ? strategy : "delete")};
    const auto r = rlf::metrics::oracle_verify(bundle->bundle, find_failure(failures, failure_id),
                                               m, recapturer, detect_options(options));
    *result_json = copy_out(oracle_json(r));
  });
}

}  // extern "C"
