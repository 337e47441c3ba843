#pragma once

#include <ostream>

namespace metriclass {

/// Exit codes: 0 success, 1 a check failed, 2 invalid input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metriclass
