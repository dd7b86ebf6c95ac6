#include <vector>

#include "metagramme/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return metagramme::run_cli(args);
}
