#include <iostream>

#include "dqsylv/cli.hpp"

int main(int argc, char** argv) { return dqsylv::cli::run(argc, argv, std::cout, std::cerr); }
