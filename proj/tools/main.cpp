#include "hsys/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return hsys::cli::run_cli(argc, argv, std::cout, std::cerr); }
