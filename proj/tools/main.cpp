#include <iostream>
#include <string>
#include <vector>

#include "dosest/cli.hpp"

int main(int argc, char** argv) {
  return dosest::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
