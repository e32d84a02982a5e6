#include <iostream>
#include <string>
#include <vector>

#include "amot/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return amot::cli::run(args, std::cout, std::cerr);
}
