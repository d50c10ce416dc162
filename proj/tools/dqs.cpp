#include <iostream>

#include "dqs/cli.hpp"

int main(int argc, char** argv) { return dqs::cli::run(argc, argv, std::cout, std::cerr); }
