#include "metrics/oracle.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "common/text_file.hpp"
#include "json.hpp"

namespace rlf::metrics {

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFixes:
      return "fixes";
    case Verdict::kNoEffect:
      return "no_effect";
    case Verdict::kIntroducesNew:
      return "introduces_new";
  }
  return "no_effect";
}

std::string Neutralization::text() const {
  switch (kind) {
    case Kind::kDelete:
      return "delete";
    case Kind::kInitial:
      return "initial";
    case Kind::kOverride:
      return "override:" + value;
  }
  return "delete";
}

Neutralization Neutralization::parse(std::string_view text) {
  if (text == "delete") return {Kind::kDelete, {}};
  if (text == "initial") return {Kind::kInitial, {}};
  constexpr std::string_view kPrefix = "override:";
  if (text.substr(0, kPrefix.size()) == kPrefix && text.size() > kPrefix.size()) {
    return {Kind::kOverride, std::string(text.substr(kPrefix.size()))};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown neutralization '" + std::string(text) + "'");
}

RecordedRecapturer::RecordedRecapturer(const std::filesystem::path& index) {
  using nlohmann::json;
  const auto base = index.parent_path();
  try {
    const json j = json::parse(read_text_file(index));
    if (j.at("schema_version").get<int>() != 1) {
      throw Error(ErrorCode::kSchema, "mutations index: unsupported schema_version");
    }
    for (const auto& m : j.at("mutations")) {
      const auto strategy = Neutralization::parse(m.at("strategy").get<std::string>()).text();
      bundles_[{m.at("xpath").get<std::string>(), m.at("property").get<std::string>(),
                strategy}] = base / m.at("bundle").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("mutations index: ") + e.what());
  }
}

snapshot::CaptureBundle RecordedRecapturer::recapture(const snapshot::CaptureBundle&,
                                                      const Mutation& mutation, int lo,
                                                      int hi) {
  auto it = bundles_.find({mutation.xpath, mutation.property, mutation.strategy.text()});
  if (it == bundles_.end()) {
    throw Error(ErrorCode::kCaptureUnavailable, "no recorded capture for " + mutation.xpath +
                                                    " " + mutation.property + " (" +
                                                    mutation.strategy.text() + ")");
  }
  auto bundle = snapshot::load_bundle(it->second);
  if (bundle.width_min() > lo || bundle.width_max() < hi) {
    throw Error(ErrorCode::kCaptureUnavailable,
                "recorded capture " + it->second.string() + " does not cover " +
                    std::to_string(lo) + ".." + std::to_string(hi));
  }
  return bundle.restricted(lo, hi);
}

BridgeRecapturer::BridgeRecapturer(io::BridgeCommand command, std::string target,
                                   std::filesystem::path work_dir, int height)
    : command_(std::move(command)),
      target_(std::move(target)),
      work_dir_(std::move(work_dir)),
      height_(height) {}

snapshot::CaptureBundle BridgeRecapturer::recapture(const snapshot::CaptureBundle& original,
                                                    const Mutation& mutation, int lo, int hi) {
  io::CaptureJob job;
  job.target = target_;
  job.out_dir = work_dir_ / ("mutation-" + std::to_string(counter_++));
  job.config.width_min = lo;
  job.config.width_max = hi;
  job.config.step = original.step();
  job.config.height = height_;
  job.mutation = io::JobMutation{mutation.xpath, mutation.property, mutation.strategy.text()};
  return io::run_capture(command_, job);
}

OracleResult oracle_verify(const snapshot::CaptureBundle& original,
                           const detection::FailureReport& failure, const Mutation& mutation,
                           Recapturer& recapturer, const detection::DetectOptions& options) {
  using Key = std::pair<detection::RlfType, std::vector<std::string>>;
  int lo = failure.fail_min;
  int hi = failure.fail_max;
  if (failure.type == detection::RlfType::kSR) {
    // A small-range failure is only visible against its neighbouring widths.
    lo = std::max(original.width_min(), lo - options.sr_max_span);
    hi = std::min(original.width_max(), hi + options.sr_max_span);
  }
  auto keys = [](const std::vector<detection::FailureReport>& reports) {
    std::set<Key> out;
    for (const auto& r : reports) out.emplace(r.type, r.affected);
    return out;
  };
  const auto before = keys(detection::detect(original.restricted(lo, hi), options));
  const auto after = keys(detection::detect(recapturer.recapture(original, mutation, lo, hi),
                                            options));
  OracleResult result;
  result.original_present = after.count({failure.type, failure.affected}) > 0;
  for (const auto& k : after) {
    if (!before.count(k)) ++result.new_failures;
  }
  if (result.new_failures > 0) {
    result.verdict = Verdict::kIntroducesNew;
  } else if (!result.original_present) {
    result.verdict = Verdict::kFixes;
  } else {
    result.verdict = Verdict::kNoEffect;
  }
  return result;
}

}  // namespace rlf::metrics
