#include <iostream>

#include "trisbf/cli.hpp"

int main(int argc, char** argv) { return trisbf::run_cli(argc, argv, std::cout, std::cerr); }
