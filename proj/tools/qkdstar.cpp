#include <iostream>
#include <string>
#include <vector>

#include "qkdstar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return qkdstar::cli::run(args, std::cout, std::cerr);
}
