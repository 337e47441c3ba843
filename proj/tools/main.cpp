#include <iostream>

#include "metriclass/cli.hpp"

int main(int argc, char** argv) { return metriclass::run_cli(argc, argv, std::cout, std::cerr); }
