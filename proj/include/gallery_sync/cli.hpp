#pragma once

#include <iosfwd>

namespace gsync::cli {

/// Exit codes: 0 success, 2 bad input (flags, files, validation), 1 anything else.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Entry point for the `gallery-sync` tool; subcommands sync, eval, gen, graph,
/// vocab and learn.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gsync::cli
