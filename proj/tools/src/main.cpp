#include <iostream>
#include <string>
#include <vector>

#include "memochaos/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return memochaos::cli::run(args, std::cout, std::cerr);
}
