#pragma once

#include <iosfwd>

namespace emars::cli {

inline constexpr int kOk = 0;
inline constexpr int kViolations = 1;
inline constexpr int kEvaluationError = 2;
inline constexpr int kUsage = 64;
inline constexpr int kParseError = 65;
inline constexpr int kLimitExceeded = 66;

/// Runs one subcommand: ingest, close, check, query, explain or pipeline.
/// Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace emars::cli
