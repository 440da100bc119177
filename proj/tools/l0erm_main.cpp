#include "l0erm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return l0erm::run_cli(argc, argv, std::cout, std::cerr); }
