#pragma once

#include <iosfwd>

namespace trisbf {

// Subcommands eval, grid, compare, bench. Returns 0 on success, 2 on usage or
// validation errors, 3 on numerical-quality failures, 1 on I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trisbf
