#include <iostream>

#include "christoffel/cli.hpp"

int main(int argc, char** argv) { return christoffel::cli::run_cli(argc, argv, std::cout, std::cerr); }
