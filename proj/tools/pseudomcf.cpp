#include <iostream>

#include "pseudomcf/cli.hpp"

int main(int argc, char** argv) { return pseudomcf::cli::run(argc, argv, std::cout, std::cerr); }
