#include <iostream>

#include "nci/cli.hpp"

int main(int argc, char** argv) { return nci::run_cli(argc, argv, std::cout, std::cerr); }
