#include <iostream>

#include "aep/cli/run.hpp"

int main(int argc, char** argv) { return aep::run(argc, argv, std::cout, std::cerr); }
