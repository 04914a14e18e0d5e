#include <iostream>
#include <string>
#include <vector>

#include "saddle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return saddle::cli::run(args, std::cout, std::cerr);
}
