#include <string>
#include <vector>

#include "coldstart/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return coldstart::run_cli(args);
}
