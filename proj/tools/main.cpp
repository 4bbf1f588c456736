#include <string>
#include <vector>

#include "pmd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pmd::run_cli(std::move(args));
}
