#pragma once

#include <iosfwd>

namespace loopsim {
namespace cli {

// Entry point behind the `loopsim` binary. Returns the process exit code:
// 0 success, 1 configuration/usage error, 2 numeric error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace loopsim
