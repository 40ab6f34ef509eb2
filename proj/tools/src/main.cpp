#include <iostream>
#include <string>
#include <vector>

#include "wpg/frontends/cli.hpp"

int main(int argc, char** argv) {
  return wpg::frontends::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
