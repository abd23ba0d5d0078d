#include "io/bridge.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "common/error.hpp"
#include "common/text_file.hpp"
#include "json.hpp"

extern char** environ;

namespace rlf::io {

using nlohmann::json;

void validate(const CaptureConfig& c) {
  if (c.step < 1) throw Error(ErrorCode::kInvalidArgument, "step must be at least 1");
  if (c.width_min < 1 || c.width_min > c.width_max) {
    throw Error(ErrorCode::kInvalidArgument, "width range must satisfy 1 <= min <= max");
  }
  if (c.height < 1) throw Error(ErrorCode::kInvalidArgument, "height must be positive");
  if (c.timeout_ms < 1) throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
}

std::string job_to_json(const CaptureJob& job) {
  json j{{"schema_version", 1},
         {"target", job.target},
         {"out_dir", job.out_dir.string()},
         {"width_min", job.config.width_min},
         {"width_max", job.config.width_max},
         {"step", job.config.step},
         {"height", job.config.height},
         {"timeout_ms", job.config.timeout_ms},
         {"noi_requests", json::array()}};
  if (job.mutation) {
    j["mutation"] = {{"xpath", job.mutation->xpath},
                     {"property", job.mutation->property},
                     {"strategy", job.mutation->strategy}};
  }
  for (const auto& r : job.noi_requests) {
    j["noi_requests"].push_back({{"failure_id", r.failure_id},
                                 {"xpath", r.xpath},
                                 {"width", r.width},
                                 {"region", {r.region.x, r.region.y, r.region.w, r.region.h}}});
  }
  return j.dump(2) + "\n";
}

CaptureJob job_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != 1) {
      throw Error(ErrorCode::kSchema, "capture job: unsupported schema_version");
    }
    CaptureJob job;
    job.target = j.at("target").get<std::string>();
    job.out_dir = j.at("out_dir").get<std::string>();
    job.config.width_min = j.at("width_min").get<int>();
    job.config.width_max = j.at("width_max").get<int>();
    job.config.step = j.at("step").get<int>();
    job.config.height = j.at("height").get<int>();
    job.config.timeout_ms = j.value("timeout_ms", 30000);
    if (j.contains("mutation")) {
      const auto& m = j["mutation"];
      job.mutation = JobMutation{m.at("xpath").get<std::string>(),
                                 m.at("property").get<std::string>(),
                                 m.at("strategy").get<std::string>()};
    }
    for (const auto& r : j.value("noi_requests", json::array())) {
      const auto& reg = r.at("region");
      job.noi_requests.push_back(
          {r.at("failure_id").get<std::string>(), r.at("xpath").get<std::string>(),
           r.at("width").get<int>(),
           {reg.at(0).get<double>(), reg.at(1).get<double>(), reg.at(2).get<double>(),
            reg.at(3).get<double>()}});
    }
    validate(job.config);
    return job;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("capture job: ") + e.what());
  }
}

BridgeCommand default_bridge_command() {
  BridgeCommand cmd;
  if (const char* env = std::getenv("RLF_BRIDGE"); env && *env) {
    std::istringstream in(env);
    std::string part;
    while (in >> part) cmd.argv.push_back(part);
  } else {
    cmd.argv.push_back("rlf-capture-bridge");
  }
  return cmd;
}

snapshot::CaptureBundle run_capture(const BridgeCommand& command, const CaptureJob& job) {
  validate(job.config);
  if (command.argv.empty()) throw Error(ErrorCode::kCaptureUnavailable, "no bridge command");
  std::filesystem::create_directories(job.out_dir);
  const auto job_file = job.out_dir.parent_path() / (job.out_dir.filename().string() + ".job.json");
  const auto err_file = job.out_dir.parent_path() / (job.out_dir.filename().string() + ".stderr");
  write_text_file(job_file, job_to_json(job));

  std::vector<std::string> args = command.argv;
  args.push_back("--job");
  args.push_back(job_file.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_file.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::kCaptureUnavailable,
                "BridgeMissing: cannot start " + args[0] + ": " + std::strerror(rc));
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw Error(ErrorCode::kCaptureUnavailable, "waitpid failed");
  }
  std::string err;
  try {
    err = read_text_file(err_file);
  } catch (const Error&) {
  }
  if (!WIFEXITED(status)) {
    throw Error(ErrorCode::kCaptureUnavailable, "bridge terminated abnormally");
  }
  const int code = WEXITSTATUS(status);
  if (code == 127) {
    throw Error(ErrorCode::kCaptureUnavailable, "BridgeMissing: " + args[0] + " not found");
  }
  if (code == kExitValidation) {
    throw Error(ErrorCode::kNavigationFailure, "bridge rejected the job: " + err);
  }
  if (code != kExitOk) {
    throw Error(ErrorCode::kCaptureUnavailable,
                "bridge failed with status " + std::to_string(code) + ": " + err);
  }
  return snapshot::load_bundle(job.out_dir);
}

}  // namespace rlf::io
