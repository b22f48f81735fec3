#include <iostream>

#include "dyadic/cli.hpp"

int main(int argc, char** argv) { return dyadic::run_cli(argc, argv, std::cout, std::cerr); }
