#include <iostream>

#include "chokefit/cli/commands.hpp"

int main(int argc, char** argv) { return chokefit::cli::run_cli(argc, argv, std::cout, std::cerr); }
