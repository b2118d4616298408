#pragma once

#include <iosfwd>

namespace aep {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFalse = 2;

// Entry point of the aeproc executable. Subcommands: simulate, verify,
// horizon, calibrate, mixture. Every run writes `<out>.manifest.json`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aep
