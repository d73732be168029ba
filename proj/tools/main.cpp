#include <iostream>

#include "ipfs/cli/cli.hpp"

int main(int argc, char** argv)
{
    std::ios::sync_with_stdio(false);
    return ipfs::cli::run_cli(argc, argv, std::cout, std::cerr);
}
