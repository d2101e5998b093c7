#include <iostream>
#include <string>
#include <vector>

#include "nulldl/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nulldl::run_cli(args, std::cout, std::cerr);
}
