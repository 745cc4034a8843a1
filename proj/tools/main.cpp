#include <iostream>

#include "vaxsde/cli.hpp"

int main(int argc, char** argv) { return vaxsde::run_cli(argc, argv, std::cout, std::cerr); }
