#ifndef FCFS_CLI_HPP
#define FCFS_CLI_HPP

#include <ostream>

namespace fcfs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

// Entry point of the fcfs tool. Subcommands: check, solve, simulate, compare.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fcfs

#endif  // FCFS_CLI_HPP
