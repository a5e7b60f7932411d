#pragma once

// Operation runners behind the subcommands. run_experiment validates the
// remaining parameters, executes, and hands back the artifact bytes plus a
// one line summary; writing and printing stay in the caller so the runners
// are directly testable.

#include "artifact.hpp"
#include "config.hpp"

#include <string>

namespace geocli {

struct RunArtifact {
  std::string kind;      // enumeration | certificate | classification | entropy | scan | growth
  bool csv = false;
  std::string bytes;     // serialized artifact
  std::string summary;   // one line, no trailing newline
  std::string out_path;  // resolved output path
  bool checks_pass = true;  // false when any embedded check failed
};

RunArtifact run_experiment(const ExperimentConfig& cfg);

}  // namespace geocli
