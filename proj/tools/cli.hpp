#ifndef BNF_TOOLS_CLI_HPP
#define BNF_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bnf::cli
{

// Stable exit codes.
enum ExitCode : int {
    ok = 0,
    other_error = 1,
    usage_error = 2,
    resonance = 3,
    order_certification = 4,
    search_budget = 5,
    growth_failed = 6,
    identity_failed = 7,
    order_budget = 8,
};

// Runs one command line (args[0] is the program name). Messages go to
// `out` and `err`; nothing is read from the environment.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace bnf::cli

#endif
