#include <iostream>

#include "bubblelab/cli/cli.hpp"

int main(int argc, char** argv) { return bubblelab::cli::run(argc, argv, std::cout, std::cerr); }
