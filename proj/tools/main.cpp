#include <iostream>

#include "smcreg/cli.hpp"

int main(int argc, char** argv) { return smcreg::cli_main(argc, argv, std::cout, std::cerr); }
