#include <iostream>

#include "hsipca/cli.hpp"

int main(int argc, char** argv) { return hsipca::cli::run(argc, argv, std::cout, std::cerr); }
