#include <iostream>

#include "experiment.hpp"

int main(int argc, char** argv) { return hklab::cli::main_entry(argc, argv, std::cout, std::cerr); }
