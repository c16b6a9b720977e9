#pragma once

#include <iosfwd>

namespace clinsent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;

/// Entry point of the clin_sent tool. Subcommands: validate, stats, gen-synth,
/// baseline, train, predict, evaluate, agreement, augment, report.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace clinsent::cli
