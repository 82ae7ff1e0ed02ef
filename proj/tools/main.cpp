#include <iostream>

#include "cli_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dynsync::cli::run(args, std::cout, std::cerr);
}
