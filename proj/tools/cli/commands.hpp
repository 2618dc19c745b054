#ifndef TWCC_CLI_COMMANDS_HPP
#define TWCC_CLI_COMMANDS_HPP

#include <iosfwd>

namespace twcc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitFit = 3,
  kExitParameters = 4,
};

/// Parses argv and runs one subcommand (fit, sample, grid, simulate, eval).
/// Results go to `out` unless --out is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twcc::cli

#endif  // TWCC_CLI_COMMANDS_HPP
