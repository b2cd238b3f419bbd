#include <iostream>

#include "liesphere/cli.hpp"

int main(int argc, char** argv) { return liesphere::run_cli(argc, argv, std::cout, std::cerr); }
