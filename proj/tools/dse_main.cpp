#include <iostream>

#include "dse/cli/cli.hpp"

int main(int argc, char** argv) { return dse::cli::main_entry(argc, argv, std::cout, std::cerr); }
