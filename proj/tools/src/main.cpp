#include <iostream>

#include "nonlocal_cli/app.hpp"

int main(int argc, char** argv) { return nonlocal::cli::runCli(argc, argv, std::cout, std::cerr); }
