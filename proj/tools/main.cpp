#include <iostream>

#include "gradedrm/cli.hpp"

int main(int argc, char** argv) { return gradedrm::run_cli(argc, argv, std::cout, std::cerr); }
