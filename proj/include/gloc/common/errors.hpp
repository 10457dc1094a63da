#pragma once

#include <stdexcept>
#include <string>

namespace gloc {

// Exit codes surfaced by the CLI. Library code throws the typed errors
// below; the dispatcher maps them to these codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitUsage = 2,
  kExitBadConfig = 3,
  kExitMissingCheckpoint = 4,
  kExitBadCheckpoint = 5,
  kExitBadData = 6,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointMissingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gloc
