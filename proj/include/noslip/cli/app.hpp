#pragma once

#include "noslip/cli/config.hpp"

#include <iosfwd>
#include <string>

namespace noslip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one of simulate, portrait, stability, wedge, sweep, verify. Artifacts
/// go under cfg.output_dir; a JSON summary goes to out.
int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out);

/// noslip <subcommand> <config> [--set key=value]...
/// Errors are reported on err as a one-line JSON record.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noslip::cli
