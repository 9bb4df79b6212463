#include <iostream>
#include <string>
#include <vector>

#include "bnmr_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bnmr::cli::run_cli(args, std::cout, std::cerr);
}
