#include "opcpd/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return opcpd::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
