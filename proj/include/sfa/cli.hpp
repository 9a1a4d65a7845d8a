#pragma once

#include <string>

namespace sfa {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_solver = 3, exit_partial = 4 };

// Entry point of the sfa-orbits command line tool; returns the process exit code.
int run_cli(int argc, char** argv);

// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

}  // namespace sfa
