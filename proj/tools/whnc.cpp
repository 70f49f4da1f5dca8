#include <iostream>

#include "whnc/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return whnc::run_cli(args, std::cout, std::cerr);
}
