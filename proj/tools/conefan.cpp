// conefan - polyhedral fans and toric differential inclusions
// Licensed under Apache 2.0

#include "conefan/cli.hpp"

int main(int argc, char** argv) { return conefan::cli::run(argc, argv, std::cout, std::cerr); }
