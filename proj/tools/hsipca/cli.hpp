#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace hsipca::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Flags shared by every subcommand after config, environment and defaults
// have been applied.
struct ExecSettings {
  std::size_t workers = 0;
  std::string mode;
  std::uint64_t seed = 0;
};

// Parses a full command line the way run() does and returns the shared
// flags. Throws CLI11 parse errors or hsipca::Error for bad values.
ExecSettings resolve_settings(int argc, const char* const* argv);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsipca::cli
