#include <iostream>
#include <string>
#include <vector>

#include "cascade/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cascade::run_cli(args, std::cout, std::cerr);
}
