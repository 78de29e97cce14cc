#include "attnet/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return attnet::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
