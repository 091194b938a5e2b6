#include <iostream>
#include <string>
#include <vector>

#include "matsf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return matsf::cli::run(args, std::cout, std::cerr);
}
