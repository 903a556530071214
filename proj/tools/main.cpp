#include <iostream>

#include "cabfare/cli.hpp"

int main(int argc, char** argv) {
  return cabfare::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
