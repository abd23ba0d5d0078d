#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "snapshot/bundle.hpp"

namespace rlf::io {

struct CaptureConfig {
  int width_min = 320;
  int width_max = 1400;
  int step = 1;
  int height = 1000;
  int timeout_ms = 30000;
};

// Throws kInvalidArgument for step < 1, an empty or inverted range, or a
// non-positive height.
void validate(const CaptureConfig& config);

struct NoiRequest {
  std::string failure_id;
  std::string xpath;
  int width = 0;
  snapshot::BBox region;
};

struct JobMutation {
  std::string xpath;
  std::string property;
  std::string strategy;  // delete | initial | override:<value>
};

struct CaptureJob {
  std::string target;  // URL or local file path
  std::filesystem::path out_dir;
  CaptureConfig config;
  std::optional<JobMutation> mutation;
  std::vector<NoiRequest> noi_requests;
};

std::string job_to_json(const CaptureJob& job);
CaptureJob job_from_json(std::string_view text);

// Bridge exit statuses, shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

struct BridgeCommand {
  // argv prefix; the job file path is appended after "--job".
  std::vector<std::string> argv;
};

// RLF_BRIDGE from the environment split on spaces, else
// "rlf-capture-bridge".
BridgeCommand default_bridge_command();

// Writes the job file next to the output directory, runs the bridge and
// loads the bundle it wrote. Errors: kCaptureUnavailable when the bridge
// cannot be started or exits with an internal status, kNavigationFailure on
// a validation exit (stderr is appended to the message).
snapshot::CaptureBundle run_capture(const BridgeCommand& command, const CaptureJob& job);

}  // namespace rlf::io
