#include <iostream>

#include "paternalism/cli.hpp"

int main(int argc, char** argv) { return paternalism::run_cli(argc, argv, std::cout, std::cerr); }
