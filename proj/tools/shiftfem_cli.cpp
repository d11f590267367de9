#include <iostream>
#include <string>
#include <vector>

#include "shiftfem/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return shiftfem::cli_main(args, std::cout, std::cerr);
}
