#pragma once

#include <iosfwd>

namespace gfdiff::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the `gfdiff` tool. Data goes to `out` (or --out), messages
/// to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gfdiff::cli
