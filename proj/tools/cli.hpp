#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bn2o::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,  // usage, I/O, parse or validation failure
    kZeroEvidence = 2,
    kCapExceeded = 3,
};

/// Runs the `bn2o` command line on `args` (program name excluded). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bn2o::cli
