#include <iostream>

#include "budgetcot/cli.hpp"

int main(int argc, char** argv) {
  return budgetcot::run_cli(argc, argv, std::cout, std::cerr);
}
