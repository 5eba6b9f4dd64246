#ifndef RIS_TOOLS_CLI_HPP
#define RIS_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ris::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kInputError = 3,
  kNumericalError = 4,
};

/// Runs one command line (args[0] is the program name). Data goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ris::cli

#endif  // RIS_TOOLS_CLI_HPP
