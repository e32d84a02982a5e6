#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amot::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

// Entry point for the `amot` executable; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amot::cli
