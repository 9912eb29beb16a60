#include <iostream>

#include "ttc/cli/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ttc::cli::main_entry(args, std::cout, std::cerr);
}
