#include <iostream>

#include "qmc/cli.hpp"

int main(int argc, char** argv) { return qmc::cli::run_cli(argc, argv, std::cout, std::cerr); }
