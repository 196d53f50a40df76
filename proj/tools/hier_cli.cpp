#include <iostream>

#include "hier/cli.hpp"

int main(int argc, char** argv) { return hier::cli::main(argc, argv, std::cout, std::cerr); }
