#include <iostream>

#include "dmtlab/cli.hpp"

int main(int argc, char** argv) { return dmtlab::run(argc, argv, std::cout, std::cerr); }
