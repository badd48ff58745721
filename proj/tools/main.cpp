#include "subsample/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return subsample::cli::run(argc, argv, std::cout, std::cerr);
}
