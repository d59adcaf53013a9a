#pragma once

// The four CLI commands. Each writes its files under config.out and returns
// the process exit code: 0 on success, 2 when a diagnostic or theorem check
// fails. Config and IO problems surface as Error(Config/Io) for the caller
// to map to exit code 1.

#include <string>
#include <vector>

#include "replab/config.hpp"
#include "replab/repeller.hpp"

namespace replab {

struct CommandResult {
  int exit_code = 0;
  std::string summary;             // human-readable, also written to summary.txt
  std::vector<std::string> files;  // paths written, in order
};

CommandResult cmd_analyze(const PipelineConfig& config);
CommandResult cmd_entropy(const PipelineConfig& config);
CommandResult cmd_build(const PipelineConfig& config);
CommandResult cmd_verify(const std::string& ifs_path, const PipelineConfig& config);

// The structured verification section shared by build and verify.
std::string verification_text(const VerificationReport& report);
std::string verification_summary(const VerificationReport& report);

}  // namespace replab
