#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sq::cli {

/// Exit codes: 0 success, 1 usage or validation error (including missing
/// input files), 2 data error (malformed or inconsistent input).
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace sq::cli
