#include <iostream>

#include "hyswitch/cli.hpp"

int main(int argc, char** argv) { return hyswitch::cli::run(argc, argv, std::cout, std::cerr); }
