#include <iostream>
#include <string>
#include <vector>

#include "randchain/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return randchain::run_command(std::move(args), std::cout, std::cerr);
}
