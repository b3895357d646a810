#ifndef IFC_CLI_HPP
#define IFC_CLI_HPP

#include <string>
#include <vector>

// The command-line front door.  `run` executes one invocation and returns
// the exit code plus everything that would be printed, so the whole surface
// is testable in-process.
//
// Commands:
//   actsfor [--ctx FILE] P Q        does P act for Q under the context?
//   min     [--ctx FILE] P          minimal representative of P
//   flowsto [--cctx F] [--ictx F] L1 L2
//   nmif    [--cctx F] [--ictx F] L uncompromised-label check
//   solve   FILE                    constraint file -> minimal solution
//   check   FILE                    surface program -> report
// Common flags: --trace (rule applications), --json (machine-readable
// output), --oracle (cross-check against the brute-force semantics).
//
// Exit codes: 0 judgment holds / accepted; 1 judgment fails / rejected;
// 2 usage or parse error; 3 oracle disagreement.

namespace ifc::cli {

struct RunResult {
    int exit_code = 0;
    std::string output;
};

RunResult run(const std::vector<std::string>& args);

}  // namespace ifc::cli

#endif  // IFC_CLI_HPP
