#pragma once

// Command-line front end: every subcommand builds one JSON report.

#include <iosfwd>
#include <string>
#include <vector>

namespace charp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitUsage = 64;

/// Environment variable that overrides the default enumeration budget.
inline constexpr const char* kBudgetEnv = "CHARP_BUDGET";

std::string report_schema_version();

/// args excludes the program name. The report (or error object) goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace charp::cli
