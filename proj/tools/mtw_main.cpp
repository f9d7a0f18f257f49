#include <iostream>

#include "mtwcheck/cli.hpp"

int main(int argc, char** argv) {
    return mtw::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
