#include <iostream>

#include "ngconv/commands.hpp"

int main(int argc, char** argv) { return ngconv::cli_main(argc, argv, std::cout, std::cerr); }
