#include <iostream>

#include "ucca/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return ucca::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
