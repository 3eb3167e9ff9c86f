#include "jhess/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return jhess::run_cli(argc, argv, std::cout, std::cerr); }
