#include <iostream>
#include <string>
#include <vector>

#include "psdpg/runner.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return psdpg::cli_main(args, std::cout, std::cerr);
}
