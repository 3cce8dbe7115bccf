#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace linetrust {

inline constexpr int kExitTrustworthy = 0;
inline constexpr int kExitUntrustworthy = 10;
inline constexpr int kExitError = 2;

// Entry point of the linetrust command; args excludes the program name.
// Returns one of the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linetrust
