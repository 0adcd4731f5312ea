#include <iostream>
#include <string>
#include <vector>

#include "budget_stream/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return budget_stream::run_cli(args, std::cout, std::cerr);
}
