#include <iostream>

#include "einmetric/cli.h"

int main(int argc, char** argv) { return einmetric::cli::run(argc, argv, std::cout, std::cerr); }
