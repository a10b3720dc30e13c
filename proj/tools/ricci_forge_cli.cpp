#include <iostream>

#include <ricci_forge/cli.hpp>

int main(int argc, char** argv) { return ricci_forge::cli::run(argc, argv, std::cout, std::cerr); }
