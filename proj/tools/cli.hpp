#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srmc::cli {

/// Exit codes of the srmc command.
enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kInvalidParameters = 2,
    kIoFailure = 3,
    kDegenerateChain = 4,
    kIntegratorBlowUp = 5,
};

/// Runs one srmc invocation. `args` excludes the program name. Results go to
/// `out` unless --out is given; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17-significant-digit rendering used in CSV output ("inf", "nan" for
/// non-finite values).
std::string format_double(double value);

}  // namespace srmc::cli
