#include <iostream>

#include "rumour/commands.hpp"

int main(int argc, char** argv) { return rumour::cli::run_cli(argc, argv, {std::cout, std::cerr}); }
