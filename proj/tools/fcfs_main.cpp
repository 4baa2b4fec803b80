#include <iostream>

#include "fcfs/cli.hpp"

int main(int argc, char** argv) { return fcfs::run_cli(argc, argv, std::cout, std::cerr); }
