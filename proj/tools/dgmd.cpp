#include <iostream>

#include "dgmd/io/cli.hpp"

int main(int argc, char** argv) { return dgmd::cli_main(argc, argv, std::cout, std::cerr); }
