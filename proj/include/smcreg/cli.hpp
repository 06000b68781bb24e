#pragma once

#include <iosfwd>

namespace smcreg {

/// Entry point for the `smcreg` tool. Returns 0 on success, 1 on usage
/// errors, 2 on data errors and 3 on internal failures. Diagnostics go to
/// `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smcreg
