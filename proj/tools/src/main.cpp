#include <iostream>

#include "bcd/cli.hpp"

int main(int argc, char** argv) { return bcd::cli::run(argc, argv, std::cout, std::cerr); }
