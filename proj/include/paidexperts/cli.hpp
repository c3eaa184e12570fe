#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace paidexperts {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

/// Entry point of the `paidexperts` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace paidexperts
