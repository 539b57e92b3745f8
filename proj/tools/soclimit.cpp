#include <iostream>

#include "soclimit/cli/commands.hpp"

int main(int argc, char** argv) { return soclimit::cli::run(argc, argv, std::cout, std::cerr); }
