#include <iostream>
#include <string>
#include <vector>

#include "causalloop/cli.h"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return causalloop::cli::run(args, std::cout, std::cerr);
}
