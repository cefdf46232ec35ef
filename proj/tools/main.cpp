#include <vector>
#include <string>

#include "dtcwt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dtcwt::cli::run(args);
}
