#include <iostream>

#include "octmesh/cli.hpp"

int main(int argc, char** argv) { return octmesh::cli::run(argc, argv, std::cout, std::cerr); }
