#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hens::cli {

/// Exit codes: 0 ok, 1 validation failure, 2 numeric failure, 64 usage.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kNumeric = 2;
inline constexpr int kUsage = 64;

/// Runs one `hens` command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hens::cli
