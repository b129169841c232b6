#pragma once

#include <string>
#include <vector>

namespace volalab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitExplosion = 3;
inline constexpr int kExitEstimation = 4;

/// Runs one command; `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace volalab::cli
