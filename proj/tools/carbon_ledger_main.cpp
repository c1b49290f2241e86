#include <carbon_ledger/cli.hpp>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return carbon_ledger::cli::run(args);
}
