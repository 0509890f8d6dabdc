#include <iostream>

#include "modelspace/cli.hpp"

int main(int argc, char** argv) { return modelspace::run_command(argc, argv, std::cout, std::cerr); }
