#pragma once

#include <iosfwd>

namespace crvpinn::cli {

/// Exit codes: 0 success, 1 numerical failure, 2 bad flags or unknown problem.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace crvpinn::cli
