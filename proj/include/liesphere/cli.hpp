#pragma once

#include <ostream>

namespace liesphere {

/// Exit codes: 0 completed, 2 usage, 3 numerical failure, 4 empty output.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace liesphere
