#ifndef DTCWT_CLI_HPP
#define DTCWT_CLI_HPP

#include <string>
#include <vector>

namespace dtcwt::cli {

/// Runs the command line given argv-style arguments (without argv[0]).
/// Exit codes: 0 success, 2 usage/config error, 1 runtime failure.
int run(const std::vector<std::string>& args);

}  // namespace dtcwt::cli

#endif
