#pragma once

#include <iosfwd>
#include <istream>

namespace objvoice::app {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

// The objvoice command line. Streams are injectable for in-process tests.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace objvoice::app
