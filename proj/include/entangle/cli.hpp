#pragma once

// Command-line front end. Kept in a library so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace entangle::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kToleranceFailure = 2 };

/// Environment variable naming the directory used when --output is absent.
inline constexpr const char* kOutputDirVariable = "ENTANGLE_OUTPUT_DIR";

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or to the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entangle::cli
