#include <iostream>

#include "repkit/cli.hpp"

int main(int argc, char** argv) { return repkit::cli::run(argc, argv, std::cout, std::cerr); }
