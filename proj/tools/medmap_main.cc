#include <iostream>
#include <string>
#include <vector>

#include "medmap/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return medmap::cli::RunCli(args, std::cout, std::cerr);
}
