#include <iostream>

#include "tbpoint/cli.h"

int main(int argc, char** argv) {
  return tbpoint::cli::run_cli(argc, argv, std::cout, std::cerr);
}
