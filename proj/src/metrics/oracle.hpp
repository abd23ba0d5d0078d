#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>

#include "detection/detect.hpp"
#include "io/bridge.hpp"
#include "snapshot/bundle.hpp"

namespace rlf::metrics {

enum class Verdict { kFixes, kNoEffect, kIntroducesNew };
const char* to_string(Verdict verdict);

// How the authored declaration is neutralized before re-capture.
struct Neutralization {
  enum class Kind { kDelete, kInitial, kOverride };
  Kind kind = Kind::kDelete;
  std::string value;  // kOverride only

  std::string text() const;  // delete | initial | override:<value>
  // Throws kInvalidArgument.
  static Neutralization parse(std::string_view text);
};

struct Mutation {
  std::string xpath;
  std::string property;
  Neutralization strategy;
};

// Produces the page with one mutation applied, captured over [lo, hi].
class Recapturer {
 public:
  virtual ~Recapturer() = default;
  virtual snapshot::CaptureBundle recapture(const snapshot::CaptureBundle& original,
                                            const Mutation& mutation, int lo, int hi) = 0;
};

// Serves bundles captured ahead of time, listed in a mutations.json index:
// {"schema_version":1,"mutations":[{"xpath","property","strategy","bundle"}]}
// with bundle paths relative to the index.
class RecordedRecapturer : public Recapturer {
 public:
  explicit RecordedRecapturer(const std::filesystem::path& index);

  snapshot::CaptureBundle recapture(const snapshot::CaptureBundle& original,
                                    const Mutation& mutation, int lo, int hi) override;

 private:
  std::map<std::tuple<std::string, std::string, std::string>, std::filesystem::path> bundles_;
};

// Re-renders through the capture bridge.
class BridgeRecapturer : public Recapturer {
 public:
  BridgeRecapturer(io::BridgeCommand command, std::string target,
                   std::filesystem::path work_dir, int height);

  snapshot::CaptureBundle recapture(const snapshot::CaptureBundle& original,
                                    const Mutation& mutation, int lo, int hi) override;

 private:
  io::BridgeCommand command_;
  std::string target_;
  std::filesystem::path work_dir_;
  int height_;
  int counter_ = 0;
};

struct OracleResult {
  Verdict verdict = Verdict::kNoEffect;
  bool original_present = true;
  int new_failures = 0;
};

// Re-captures [fail_min, fail_max] with the mutation and re-runs detection.
// Small-range failures widen the window by sr_max_span on both sides.
// The mutated reports are compared with detection on the original bundle
// restricted to the same range, by (type, affected). Errors propagate
// kCaptureUnavailable from the recapturer.
OracleResult oracle_verify(const snapshot::CaptureBundle& original,
                           const detection::FailureReport& failure, const Mutation& mutation,
                           Recapturer& recapturer,
                           const detection::DetectOptions& options = {});

}  // namespace rlf::metrics
