#include <iostream>
#include <string>
#include <vector>

#include "treematroid/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return treematroid::cli::run(args, std::cout, std::cerr);
}
