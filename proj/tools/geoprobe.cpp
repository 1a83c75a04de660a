#include "geoprobe/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return geoprobe::cli::run(argc, argv, std::cout, std::cerr);
}
