#include <iostream>

#include "bclab/cli.hpp"

int main(int argc, char** argv) {
  return bclab::cli::main_entry(argc, argv, std::cout, std::cerr);
}
