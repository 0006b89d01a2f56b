#include <iostream>

#include "ctnet/interface/cli.hpp"

int main(int argc, char** argv) { return ctnet::cli_dispatch(argc, argv, std::cout, std::cerr); }
