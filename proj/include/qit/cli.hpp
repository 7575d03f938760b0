#pragma once

// Command-line front-end. `run` parses an argument vector (program name
// first), dispatches to one of the subcommands entropy, measures, fuzz,
// markov, maxent, smb and writes the report to --out or `out`.
//
// Exit status: 0 success, 2 bad arguments / unreadable input / numeric
// error, 3 a verification check failed.

#include <iosfwd>
#include <string>
#include <vector>

namespace qit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace qit::cli
