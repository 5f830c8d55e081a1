#include "noslip/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return noslip::cli::cli_main(argc, argv, std::cout, std::cerr); }
