#include "resonance_atlas/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return resonance_atlas::run_cli(argc, argv, std::cout, std::cerr); }
