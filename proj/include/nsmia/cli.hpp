#ifndef NSMIA_CLI_HPP
#define NSMIA_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nsmia::cli {

inline constexpr std::uint64_t kDefaultSeed = 20170712;

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2 };

/// Parses "64,128", "64:512" or "64:32:512" (lo:step:hi) into a list.
std::vector<int> parse_int_list(std::string_view text);

/// Entry point behind the `mia` executable. `args` excludes the program name.
/// Data goes to `out` (unless --out names a file), progress and diagnostics
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsmia::cli

#endif  // NSMIA_CLI_HPP
