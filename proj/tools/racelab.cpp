#include <iostream>

#include "racelab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return racelab::run_cli(args, std::cout, std::cerr);
}
