#include <iostream>

#include "kschem/cli.hpp"

int main(int argc, char** argv) { return kschem::run_cli(argc, argv, std::cout, std::cerr); }
