#include <iostream>

#include "fracgrowth/cli.hpp"

int main(int argc, char** argv) {
  return fracgrowth::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
