#include "ctxprob/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return ctxprob::cli::run(std::vector<std::string>(argv, argv + argc), std::cin, std::cout,
                             std::cerr);
}
