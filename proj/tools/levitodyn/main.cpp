#include <iostream>

#include "levitodyn/cli.hpp"

int main(int argc, char** argv) { return levitodyn::cli::run(argc, argv, std::cout, std::cerr); }
