#include <iostream>

#include "coxaff/cli.hpp"

int main(int argc, char** argv) { return coxaff::run_cli(argc, argv, std::cout, std::cerr); }
