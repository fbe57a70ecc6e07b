#include <iostream>
#include <string>
#include <vector>

#include "knotenergy_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return knotenergy::cli::run(args, std::cout, std::cerr);
}
