#include <iostream>

#include "sphcone/cli.hpp"

int main(int argc, char** argv) { return sphcone::run_cli(argc, argv, std::cout, std::cerr); }
