#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsmix {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_numerical = 3 };

/// Runs one command line (without the program name). Primary outputs go to
/// `out` unless an output path is given; usage text, warnings and error
/// messages go to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// One --via argument of the form t_index:dim=value@noise.
struct ViaSpec {
  long time_index;
  int dim;
  double value;
  double noise;
};
ViaSpec parse_via(const std::string &text);

} // namespace tsmix
