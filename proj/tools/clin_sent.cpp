#include <iostream>

#include "clinsent/cli.hpp"

int main(int argc, char** argv) { return clinsent::cli::run(argc, argv, std::cout, std::cerr); }
