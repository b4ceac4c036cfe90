#include <iostream>

#include "shm/cli.hpp"

int main(int argc, char** argv) { return shm::cli::main_entry(argc, argv, std::cout, std::cerr); }
