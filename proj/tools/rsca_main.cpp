#include <iostream>

#include "rsca_cli/app.hpp"

int main(int argc, char** argv) { return rsca::cli::run_cli(argc, argv, std::cout, std::cerr); }
