#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return handle_forge::cli::run(argc, argv, std::cout, std::cerr); }
