#include <iostream>

#include "orthonet/cli.hpp"

int main(int argc, char** argv) { return orthonet::cli::main(argc, argv, std::cout, std::cerr); }
