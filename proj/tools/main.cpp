#include <iostream>

#include "objvoice/app/cli.hpp"

int main(int argc, char** argv) {
  return objvoice::app::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
