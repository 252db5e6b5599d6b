#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opnorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand (gen, norm, net, tails, sweep, decay, diag, tw).
// Failures print one line "error: <kind>: <message>" to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace opnorm::cli
