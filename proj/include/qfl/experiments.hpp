#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfl {

enum class Command { kVerifyExpressivity, kTorusScan, kSeparation, kSampleBound, kTrainSynthetic };

const char* command_name(Command c);
Command command_from_name(std::string_view name);

struct Artifact {
  std::string name;  // file name inside the output directory
  std::string data;
};

struct ExperimentResult {
  bool passed = false;
  std::vector<Artifact> artifacts;  // config_echo.json first
};

// Config is a JSON object; unknown keys, wrong types or out-of-range values
// raise kConfig. "seed" and "shots" may appear in the config; explicit
// overrides win. A config echo from an earlier run is accepted as a config.
struct ExperimentRequest {
  Command command = Command::kVerifyExpressivity;
  std::string config_json = "{}";
  std::optional<std::uint64_t> seed;
  // Set: shot mode with that many shots. Empty with shots_exact: exact mode.
  std::optional<std::size_t> shots;
  bool shots_exact = false;
};

// Parses and resolves the config without running; returns the echo text.
std::string resolve_config(const ExperimentRequest& request);

ExperimentResult run_experiment(const ExperimentRequest& request);

}  // namespace qfl
