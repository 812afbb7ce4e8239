#include <iostream>

#include "evidential/cli.hpp"

int main(int argc, char** argv) {
  return evidential::cli::run(argc, argv, std::cout, std::cerr);
}
