#include <iostream>

#include "linetrust/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return linetrust::run_cli(args, std::cout, std::cerr);
}
