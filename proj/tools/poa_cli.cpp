#include <iostream>

#include "poa/cli.hpp"

int main(int argc, char** argv) {
  return poa::cli::main_entry(argc, argv, std::cout, std::cerr);
}
