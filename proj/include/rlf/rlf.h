/* C interface to the responsive layout failure toolchain.
 *
 * Objects are opaque handles released with their matching *_free call.
 * Functions returning char* hand over ownership; release with
 * rlf_string_free. On failure a function returns a non-zero rlf_status and
 * rlf_last_error() describes it (per thread, valid until the next call).
 */
#ifndef RLF_RLF_H
#define RLF_RLF_H

#include <stddef.h>

#if defined(_WIN32)
#define RLF_API __declspec(dllexport)
#else
#define RLF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rlf_status {
  RLF_OK = 0,
  RLF_ERR_SCHEMA = 1,
  RLF_ERR_MISSING_VIEWPORT = 2,
  RLF_ERR_DUPLICATE_XPATH = 3,
  RLF_ERR_UNKNOWN_XPATH = 4,
  RLF_ERR_UNSAMPLED_WIDTH = 5,
  RLF_ERR_DIMENSION_MISMATCH = 6,
  RLF_ERR_EMPTY_CANDIDATE_SET = 7,
  RLF_ERR_CAPTURE_UNAVAILABLE = 8,
  RLF_ERR_NAVIGATION_FAILURE = 9,
  RLF_ERR_IO = 10,
  RLF_ERR_INVALID_ARGUMENT = 11,
  RLF_ERR_INTERNAL = 12
} rlf_status;

typedef struct rlf_bundle rlf_bundle;
typedef struct rlf_failures rlf_failures;
typedef struct rlf_ranked rlf_ranked;

RLF_API const char* rlf_version(void);
RLF_API const char* rlf_last_error(void);
RLF_API const char* rlf_status_name(rlf_status status);
/* 0 success, 1 invalid input, 2 internal or environment failure. */
RLF_API int rlf_status_exit_code(rlf_status status);
RLF_API void rlf_string_free(char* text);

/* Bundles */
RLF_API rlf_status rlf_bundle_load(const char* dir, rlf_bundle** out);
RLF_API void rlf_bundle_free(rlf_bundle* bundle);
/* {"url","width_min","width_max","step","height","records","elements","warnings"} */
RLF_API rlf_status rlf_bundle_info(const rlf_bundle* bundle, char** json_out);
/* box = {x, y, w, h} */
RLF_API rlf_status rlf_bundle_element_box(const rlf_bundle* bundle, const char* xpath,
                                          int width, double box[4]);

/* Detection */
typedef struct rlf_detect_options {
  double eps;
  int sr_max_span;
  double row_overlap;
} rlf_detect_options;

RLF_API void rlf_detect_options_default(rlf_detect_options* options);
/* options may be NULL for defaults. */
RLF_API rlf_status rlf_detect(const rlf_bundle* bundle, const rlf_detect_options* options,
                              rlf_failures** out);
RLF_API rlf_status rlf_failures_from_json(const char* json, rlf_failures** out);
RLF_API rlf_status rlf_failures_to_json(const rlf_failures* failures, char** json_out);
RLF_API size_t rlf_failures_count(const rlf_failures* failures);
RLF_API void rlf_failures_free(rlf_failures* failures);

/* Visibility check */
typedef struct rlf_noi_options {
  int channel_threshold;
  long min_diff_pixels;
} rlf_noi_options;

RLF_API void rlf_noi_options_default(rlf_noi_options* options);
/* Classifies every failure with a screenshot pair in the bundle. */
RLF_API rlf_status rlf_noi_annotate(const rlf_bundle* bundle, rlf_failures* failures,
                                    const rlf_noi_options* options);
/* region = {x, y, w, h} in device px; observable receives 1 or 0. */
RLF_API rlf_status rlf_noi_classify_png(const char* visible_png, const char* hidden_png,
                                        const double region[4],
                                        const rlf_noi_options* options, int* observable,
                                        long* differing_pixels);

/* Localization and ranking */
typedef struct rlf_localize_options {
  int hops;
  double eps;
  int numeric_first;
} rlf_localize_options;

RLF_API void rlf_localize_options_default(rlf_localize_options* options);
RLF_API rlf_status rlf_localize(const rlf_bundle* bundle, const rlf_failures* failures,
                                const rlf_localize_options* options, rlf_ranked** out);
RLF_API rlf_status rlf_ranked_to_json(const rlf_ranked* ranked, char** json_out);
RLF_API rlf_status rlf_candidates_to_json(const rlf_ranked* ranked, char** json_out);
RLF_API void rlf_ranked_free(rlf_ranked* ranked);

/* Plain-text rendering of a ranked or metrics document. */
RLF_API rlf_status rlf_render_report(const char* document_json, char** text_out);

/* Evaluation */
typedef struct rlf_evaluate_options {
  int exclude_np;
  int exclude_we_np;
  int k;
} rlf_evaluate_options;

RLF_API void rlf_evaluate_options_default(rlf_evaluate_options* options);
RLF_API rlf_status rlf_evaluate(const char* const* ranked_json, size_t page_count,
                                const char* truth_json, const rlf_evaluate_options* options,
                                char** metrics_json_out);

/* Fix verification. strategy: "delete", "initial" or "override:<value>".
 * result: {"verdict","original_present","new_failures"} */
RLF_API rlf_status rlf_verify_recorded(const rlf_bundle* bundle,
                                       const rlf_failures* failures, const char* failure_id,
                                       const char* xpath, const char* property,
                                       const char* strategy, const char* mutations_index,
                                       const rlf_detect_options* options, char** result_json);

/* Capture through the bridge subprocess. bridge_command is split on spaces;
 * NULL uses RLF_BRIDGE or "rlf-capture-bridge". */
typedef struct rlf_capture_config {
  int width_min;
  int width_max;
  int step;
  int height;
  int timeout_ms;
} rlf_capture_config;

RLF_API void rlf_capture_config_default(rlf_capture_config* config);
RLF_API rlf_status rlf_capture(const char* bridge_command, const char* target,
                               const char* out_dir, const rlf_capture_config* config);
RLF_API rlf_status rlf_verify_bridge(const rlf_bundle* bundle, const rlf_failures* failures,
                                     const char* failure_id, const char* xpath,
                                     const char* property, const char* strategy,
                                     const char* bridge_command, const char* target,
                                     const char* work_dir, const rlf_detect_options* options,
                                     char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* RLF_RLF_H */
