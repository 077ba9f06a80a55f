#pragma once

#include <iosfwd>

namespace resonance_atlas {

/// Exit codes: 0 success, 1 failed checks (verify, jensen), 2 usage or
/// invalid value, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace resonance_atlas
