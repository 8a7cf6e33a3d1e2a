#include <iostream>
#include <string>
#include <vector>

#include "rtbias/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rtbias::cli::run(args, std::cout, std::cerr);
}
