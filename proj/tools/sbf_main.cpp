#include "sbf/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sbf::cli::run(argc, argv, std::cout, std::cerr); }
