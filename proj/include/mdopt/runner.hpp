// Executes a parsed config: runs the experiment, writes CSVs and summary.txt.
#pragma once

#include <string>
#include <vector>

#include "mdopt/config.hpp"

namespace mdopt {

struct RunOutcome {
  int exit_code = 1;                   // 0 iff every summary check passed
  std::vector<std::string> artifacts;  // files written, summary last
  std::string summary_path;
};

// Writes the command's CSV artifacts plus summary.txt under the config's
// output prefix (`out_override`, when nonempty, replaces it). The summary
// header echoes the resolved config in reparseable form; check lines use the
// stable prefix "CHECK <name>: PASS|FAIL <details>". An aborted run keeps
// its partial CSV under a ".partial" suffix. Identical (config, seed) yield
// byte-identical artifacts. Throws on I/O failure.
RunOutcome run(const ExperimentConfig& config, const std::string& out_override = "",
               bool quiet = false);

}  // namespace mdopt
