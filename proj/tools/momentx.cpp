#include <iostream>
#include <string>
#include <vector>

#include "momx/cli.hpp"

int main(int argc, char** argv) {
  return momx::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
