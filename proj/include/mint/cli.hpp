#pragma once

#include <iosfwd>

namespace mint {

/// Entry point behind the mint binary: parses argv, runs one subcommand,
/// writes the Report JSON to out and the human log to err. Returns 0 on
/// pass, 1 on fail or a computational error, 2 on usage or I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mint
