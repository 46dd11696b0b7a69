#ifndef CAUSALLOOP_CLI_H
#define CAUSALLOOP_CLI_H

#include <ostream>
#include <span>
#include <string>

namespace causalloop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream &out, std::ostream &err);

}  // namespace causalloop::cli

#endif
