#include <string>
#include <vector>

#include "ldlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ldlab::cli::run(std::move(args));
}
