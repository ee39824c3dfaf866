#include "mwvc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return mwvc::cli_main(argc, argv, std::cout, std::cerr);
}
