#include <iostream>

#include "ergen/cli.hpp"

int main(int argc, char** argv) { return ergen::cli::run(argc, argv, std::cout, std::cerr); }
