#include <iostream>

#include "ccall/cli.hpp"

int main(int argc, char** argv) {
  return ccall::run_cli(argc, argv, std::cout, std::cerr);
}
