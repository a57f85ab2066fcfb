#include <iostream>

#include "gfdiff/cli.hpp"

int main(int argc, char** argv) { return gfdiff::cli::run(argc, argv, std::cout, std::cerr); }
