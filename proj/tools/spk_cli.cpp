#include <iostream>
#include <string>
#include <vector>

#include "spk_cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spk::cli::run(args, std::cout, std::cerr);
}
