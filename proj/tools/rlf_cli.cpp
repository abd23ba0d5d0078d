// rlf: command-line front end over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlf/rlf.h"

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(rlf_status status) {
  throw Failure{rlf_status_exit_code(status), rlf_last_error()};
}

void check(rlf_status status) {
  if (status != RLF_OK) fail(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{1, "cannot read " + path};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{2, "cannot write " + path};
}

void print_config(const std::string& command, const json& config) {
  std::cerr << "rlf " << command << " config " << config.dump() << "\n";
}

struct StringDeleter {
  void operator()(char* s) const { rlf_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

std::string take(char* s) { return OwnedString(s).get(); }

struct BundleDeleter {
  void operator()(rlf_bundle* b) const { rlf_bundle_free(b); }
};
struct FailuresDeleter {
  void operator()(rlf_failures* f) const { rlf_failures_free(f); }
};
struct RankedDeleter {
  void operator()(rlf_ranked* r) const { rlf_ranked_free(r); }
};
using Bundle = std::unique_ptr<rlf_bundle, BundleDeleter>;
using Failures = std::unique_ptr<rlf_failures, FailuresDeleter>;
using Ranked = std::unique_ptr<rlf_ranked, RankedDeleter>;

Bundle load_bundle(const std::string& dir) {
  rlf_bundle* b = nullptr;
  check(rlf_bundle_load(dir.c_str(), &b));
  return Bundle(b);
}

Failures load_failures(const std::string& path) {
  rlf_failures* f = nullptr;
  check(rlf_failures_from_json(read_file(path).c_str(), &f));
  return Failures(f);
}

struct Args {
  std::string bundle;
  std::string failures;
  std::string output;
  std::string target;
  std::string bridge;
  rlf_capture_config capture{};
  rlf_detect_options detect{};
  rlf_noi_options noi{};
  rlf_localize_options localize{};
  bool numeric_first = false;
  std::string candidates_out;
  std::vector<std::string> ranked;
  std::string truth;
  rlf_evaluate_options evaluate{};
  bool exclude_np = false;
  bool exclude_we_np = false;
  std::string document;
  std::string failure_id;
  std::string xpath;
  std::string property;
  std::string strategy = "delete";
  std::string mutations;
  std::string work_dir;
};

json detect_config(const rlf_detect_options& d) {
  return {{"eps", d.eps}, {"sr_max_span", d.sr_max_span}, {"row_overlap", d.row_overlap}};
}

void cmd_capture(const Args& a) {
  print_config("capture", {{"target", a.target},
                           {"out", a.output},
                           {"bridge", a.bridge.empty() ? json(nullptr) : json(a.bridge)},
                           {"width_min", a.capture.width_min},
                           {"width_max", a.capture.width_max},
                           {"step", a.capture.step},
                           {"height", a.capture.height},
                           {"timeout_ms", a.capture.timeout_ms}});
  check(rlf_capture(a.bridge.empty() ? nullptr : a.bridge.c_str(), a.target.c_str(),
                    a.output.c_str(), &a.capture));
}

void cmd_detect(const Args& a) {
  print_config("detect", {{"bundle", a.bundle}, {"detect", detect_config(a.detect)}});
  auto bundle = load_bundle(a.bundle);
  rlf_failures* f = nullptr;
  check(rlf_detect(bundle.get(), &a.detect, &f));
  Failures failures(f);
  char* out = nullptr;
  check(rlf_failures_to_json(failures.get(), &out));
  write_output(a.output, take(out));
}

void cmd_noi(const Args& a) {
  print_config("noi", {{"bundle", a.bundle},
                       {"failures", a.failures},
                       {"channel_threshold", a.noi.channel_threshold},
                       {"min_diff_pixels", a.noi.min_diff_pixels}});
  auto bundle = load_bundle(a.bundle);
  auto failures = load_failures(a.failures);
  check(rlf_noi_annotate(bundle.get(), failures.get(), &a.noi));
  char* out = nullptr;
  check(rlf_failures_to_json(failures.get(), &out));
  write_output(a.output, take(out));
}

void cmd_localize(const Args& a) {
  rlf_localize_options o = a.localize;
  o.numeric_first = a.numeric_first ? 1 : 0;
  print_config("localize", {{"bundle", a.bundle},
                            {"failures", a.failures},
                            {"hops", o.hops},
                            {"eps", o.eps},
                            {"numeric_first", a.numeric_first}});
  auto bundle = load_bundle(a.bundle);
  auto failures = load_failures(a.failures);
  rlf_ranked* r = nullptr;
  check(rlf_localize(bundle.get(), failures.get(), &o, &r));
  Ranked ranked(r);
  if (!a.candidates_out.empty()) {
    char* c = nullptr;
    check(rlf_candidates_to_json(ranked.get(), &c));
    write_output(a.candidates_out, take(c));
  }
  char* out = nullptr;
  check(rlf_ranked_to_json(ranked.get(), &out));
  write_output(a.output, take(out));
}

void cmd_evaluate(const Args& a) {
  rlf_evaluate_options o = a.evaluate;
  o.exclude_np = a.exclude_np ? 1 : 0;
  o.exclude_we_np = a.exclude_we_np ? 1 : 0;
  print_config("evaluate", {{"ranked", a.ranked},
                            {"truth", a.truth},
                            {"k", o.k},
                            {"exclude_np", a.exclude_np},
                            {"exclude_we_np", a.exclude_we_np}});
  std::vector<std::string> texts;
  for (const auto& p : a.ranked) texts.push_back(read_file(p));
  std::vector<const char*> ptrs;
  for (const auto& t : texts) ptrs.push_back(t.c_str());
  const std::string truth = read_file(a.truth);
  char* out = nullptr;
  check(rlf_evaluate(ptrs.data(), ptrs.size(), truth.c_str(), &o, &out));
  write_output(a.output, take(out));
}

void cmd_report(const Args& a) {
  print_config("report", {{"document", a.document}});
  char* out = nullptr;
  check(rlf_render_report(read_file(a.document).c_str(), &out));
  write_output(a.output, take(out));
}

void cmd_verify(const Args& a) {
  const bool recorded = !a.mutations.empty();
  if (!recorded && a.target.empty()) {
    throw Failure{1, "verify needs --mutations, or --target with a capture bridge"};
  }
  print_config("verify", {{"bundle", a.bundle},
                          {"failures", a.failures},
                          {"failure", a.failure_id},
                          {"xpath", a.xpath},
                          {"property", a.property},
                          {"strategy", a.strategy},
                          {"mutations", a.mutations},
                          {"target", a.target},
                          {"detect", detect_config(a.detect)}});
  auto bundle = load_bundle(a.bundle);
  auto failures = load_failures(a.failures);
  char* out = nullptr;
  if (recorded) {
    check(rlf_verify_recorded(bundle.get(), failures.get(), a.failure_id.c_str(),
                              a.xpath.c_str(), a.property.c_str(), a.strategy.c_str(),
                              a.mutations.c_str(), &a.detect, &out));
  } else {
    const std::string work = a.work_dir.empty() ? std::string("rlf-verify") : a.work_dir;
    check(rlf_verify_bridge(bundle.get(), failures.get(), a.failure_id.c_str(),
                            a.xpath.c_str(), a.property.c_str(), a.strategy.c_str(),
                            a.bridge.empty() ? nullptr : a.bridge.c_str(), a.target.c_str(),
                            work.c_str(), &a.detect, &out));
  }
  write_output(a.output, take(out));
}

void add_detect_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--eps", a.detect.eps, "Geometry tolerance in px")->capture_default_str();
  cmd->add_option("--sr-max-span", a.detect.sr_max_span,
                  "Widest small-range window in px")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--row-overlap", a.detect.row_overlap,
                  "Vertical overlap fraction that puts two siblings on one row")
      ->capture_default_str()
      ->check(CLI::Range(0.01, 1.0));
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  rlf_capture_config_default(&a.capture);
  rlf_detect_options_default(&a.detect);
  rlf_noi_options_default(&a.noi);
  rlf_localize_options_default(&a.localize);
  rlf_evaluate_options_default(&a.evaluate);

  CLI::App app{"Detect, localize and rank responsive layout failures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rlf_version());

  auto* capture = app.add_subcommand("capture", "Capture a page into a bundle via the bridge");
  capture->add_option("target", a.target, "URL or local page")->required();
  capture->add_option("-o,--out", a.output, "Bundle directory")->required();
  capture->add_option("--width-min", a.capture.width_min)->capture_default_str();
  capture->add_option("--width-max", a.capture.width_max)->capture_default_str();
  capture->add_option("--step", a.capture.step)->capture_default_str();
  capture->add_option("--height", a.capture.height)->capture_default_str();
  capture->add_option("--timeout-ms", a.capture.timeout_ms)->capture_default_str();
  capture->add_option("--bridge", a.bridge, "Bridge command (default: $RLF_BRIDGE)");

  auto* detect = app.add_subcommand("detect", "Detect failures in a bundle");
  detect->add_option("bundle", a.bundle)->required()->check(CLI::ExistingDirectory);
  detect->add_option("-o,--out", a.output, "failures.json (default stdout)");
  add_detect_flags(detect, a);

  auto* noi = app.add_subcommand("noi", "Mark failures with no visible effect");
  noi->add_option("bundle", a.bundle)->required()->check(CLI::ExistingDirectory);
  noi->add_option("failures", a.failures)->required()->check(CLI::ExistingFile);
  noi->add_option("-o,--out", a.output);
  noi->add_option("--channel-threshold", a.noi.channel_threshold)
      ->capture_default_str()
      ->check(CLI::Range(0, 255));
  noi->add_option("--min-diff-pixels", a.noi.min_diff_pixels)
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  auto* localize = app.add_subcommand("localize", "Localize and rank CSS properties");
  localize->add_option("bundle", a.bundle)->required()->check(CLI::ExistingDirectory);
  localize->add_option("failures", a.failures)->required()->check(CLI::ExistingFile);
  localize->add_option("-o,--out", a.output, "ranked.json (default stdout)");
  localize->add_option("--candidates-out", a.candidates_out, "Unranked candidate sets");
  localize->add_flag("--numeric-first", a.numeric_first,
                     "Put value-bearing candidates before non-numeric ones");
  localize->add_option("--hops", a.localize.hops, "Structural neighbour radius")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  localize->add_option("--eps", a.localize.eps)->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Top-N, MRR and P@K against ground truth");
  evaluate->add_option("ranked", a.ranked, "ranked.json per page")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--truth", a.truth)->required()->check(CLI::ExistingFile);
  evaluate->add_option("-o,--out", a.output);
  evaluate->add_flag("--exclude-np", a.exclude_np, "Drop failures marked No Problem");
  evaluate->add_flag("--exclude-we-np", a.exclude_we_np,
                     "Drop wrapping failures marked No Problem");
  evaluate->add_option("-k", a.evaluate.k, "Cut-off for P@K")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Plain-text view of ranked or metrics JSON");
  report->add_option("document", a.document)->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", a.output);

  auto* verify = app.add_subcommand("verify", "Check whether neutralizing a pair fixes a failure");
  verify->add_option("bundle", a.bundle)->required()->check(CLI::ExistingDirectory);
  verify->add_option("failures", a.failures)->required()->check(CLI::ExistingFile);
  verify->add_option("--failure", a.failure_id)->required();
  verify->add_option("--xpath", a.xpath)->required();
  verify->add_option("--property", a.property)->required();
  verify->add_option("--strategy", a.strategy, "delete, initial or override:<value>")
      ->capture_default_str();
  verify->add_option("--mutations", a.mutations, "Index of recorded mutated captures")
      ->check(CLI::ExistingFile);
  verify->add_option("--target", a.target, "Page to re-capture through the bridge");
  verify->add_option("--bridge", a.bridge);
  verify->add_option("--work-dir", a.work_dir);
  verify->add_option("-o,--out", a.output);
  add_detect_flags(verify, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*capture) cmd_capture(a);
    if (*detect) cmd_detect(a);
    if (*noi) cmd_noi(a);
    if (*localize) cmd_localize(a);
    if (*evaluate) cmd_evaluate(a);
    if (*report) cmd_report(a);
    if (*verify) cmd_verify(a);
  } catch (const Failure& f) {
    std::cerr << "rlf: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "rlf: internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
