#pragma once

#include <iosfwd>

namespace ctnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

/// Runs one command line. Reports go to `out`, diagnostics and usage text
/// to `err`. Returns 0 on success, 1 on a usage or configuration error and
/// 2 on a data or numeric error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctnet
