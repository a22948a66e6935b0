#include <iostream>

#include "thermlab/cli.hpp"

int main(int argc, char** argv) { return thermlab::cli::main(argc, argv, std::cout, std::cerr); }
