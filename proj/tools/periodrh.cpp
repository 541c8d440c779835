#include "periodrh/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return periodrh::cli::parse_and_dispatch(args, std::cout, std::cerr);
}
