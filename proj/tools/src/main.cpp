#include <iostream>

#include "mrad/cli/commands.hpp"

int main(int argc, char** argv) {
  return mrad::cli::run_cli(argc, argv, std::cout, std::cerr);
}
