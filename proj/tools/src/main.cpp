#include <iostream>

#include "ferrysim_cli/cli.hpp"

int main(int argc, char** argv) {
    return ferry::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
