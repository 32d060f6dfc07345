#pragma once

namespace rtfnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Parses argv, runs one subcommand and maps failures onto exit codes.
int run_cli(int argc, char** argv);

}  // namespace rtfnet
