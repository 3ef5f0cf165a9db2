#include <iostream>

#include "qtkz/cli.hpp"

int main(int argc, char **argv) { return qtkz::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
