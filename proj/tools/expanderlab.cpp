#include <iostream>

#include "expanderlab/cli.hpp"

int main(int argc, char** argv) { return expanderlab::cli::main(argc, argv, std::cout, std::cerr); }
