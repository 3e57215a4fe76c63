#include <iostream>

#include "holoq/cli/app.hpp"

int main(int argc, char** argv) {
    return holoq::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
