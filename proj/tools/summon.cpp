#include "summon/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return summon::run_cli(argc, argv, std::cout, std::cerr); }
